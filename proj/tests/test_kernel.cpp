#include <doctest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "wfgame/kernel.hpp"

using namespace wfgame;

TEST_CASE("complete kernel") {
    VotingKernel k3 = VotingKernel::complete(3);
    for (int x = 0; x < 3; ++x) {
        CHECK(k3.q()(x, x) == 0.0);
        CHECK(k3.pi()(x) == doctest::Approx(1.0 / 3).epsilon(1e-14));
        for (int y = 0; y < 3; ++y) {
            if (x != y) CHECK(k3.q()(x, y) == doctest::Approx(0.5).epsilon(1e-15));
        }
    }

    VotingKernel k2 = VotingKernel::complete(2);
    CHECK(k2.q()(0, 1) == 1.0);
    CHECK(k2.q()(1, 0) == 1.0);
    CHECK(k2.pi()(0) == 0.5);

    // symmetric matrix: detailed balance residual is exactly zero
    VotingKernel k4 = VotingKernel::complete(4);
    double res = 0.0;
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
            res = std::max(res, std::abs(k4.pi()(x) * k4.q()(x, y) - k4.pi()(y) * k4.q()(y, x)));
        }
    }
    CHECK(res == 0.0);

    CHECK_THROWS_AS(VotingKernel::complete(1), InvalidInput);
}

TEST_CASE("cycle kernel") {
    CHECK_THROWS_AS(VotingKernel::cycle(2), InvalidInput);

    VotingKernel c4 = VotingKernel::cycle(4);
    // two-step return probability via an independent matrix-square oracle
    Eigen::MatrixXd q2 = testutil::naive_power(c4.q(), 2);
    for (int x = 0; x < 4; ++x) CHECK(q2(x, x) == doctest::Approx(0.5).epsilon(1e-15));

    KernelAnalysis a = analyze(c4, 0);
    CHECK(a.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.eigenvalues(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.eigenvalues(2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.eigenvalues(3) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(a.spectral_gap == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.absolute_gap == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::isinf(a.mixing_time_bound));

    // the triangle is the complete graph
    VotingKernel c3 = VotingKernel::cycle(3);
    VotingKernel k3 = VotingKernel::complete(3);
    CHECK((c3.q() - k3.q()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random regular kernel") {
    // the unique 3-regular graph on 4 vertices
    VotingKernel r = VotingKernel::random_regular(4, 3, 99);
    CHECK((r.q() - VotingKernel::complete(4).q()).cwiseAbs().maxCoeff() == 0.0);

    VotingKernel g = VotingKernel::random_regular(10, 3, 1);
    for (int x = 0; x < 10; ++x) {
        CHECK(g.neighbors(x).size() == 3);
        CHECK(g.q()(x, x) == 0.0);
        for (int y : g.neighbors(x)) CHECK(g.q()(x, y) == doctest::Approx(1.0 / 3).epsilon(1e-15));
        CHECK(g.pi()(x) == doctest::Approx(0.1).epsilon(1e-14));
    }

    VotingKernel g2 = VotingKernel::random_regular(10, 3, 1);
    CHECK((g.q() - g2.q()).cwiseAbs().maxCoeff() == 0.0); // deterministic in the seed

    CHECK_THROWS_AS(VotingKernel::random_regular(7, 3, 1), InvalidInput);  // odd n*k
    CHECK_THROWS_AS(VotingKernel::random_regular(4, 5, 1), InvalidInput);  // k >= n
    CHECK_THROWS_AS(VotingKernel::random_regular(10, 2, 1), InvalidInput); // k < 3
}

TEST_CASE("weighted graph kernel") {
    // path on 3 vertices
    VotingKernel path = VotingKernel::from_weighted_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    CHECK(path.pi()(0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(path.pi()(1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(path.pi()(2) == doctest::Approx(0.25).epsilon(1e-14));

    VotingKernel tri = VotingKernel::from_weighted_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
    CHECK((tri.q() - VotingKernel::complete(3).q()).cwiseAbs().maxCoeff() < 1e-15);

    VotingKernel star = VotingKernel::from_weighted_graph(
        4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
    CHECK(star.pi()(0) == doctest::Approx(0.5).epsilon(1e-14));
    for (int leaf = 1; leaf < 4; ++leaf) {
        CHECK(star.pi()(leaf) == doctest::Approx(1.0 / 6).epsilon(1e-14));
    }

    CHECK_THROWS_AS(VotingKernel::from_weighted_graph(3, {{0, 0, 1.0}, {1, 2, 1.0}}), InvalidInput);
    // disconnected
    CHECK_THROWS_AS(VotingKernel::from_weighted_graph(4, {{0, 1, 1.0}, {2, 3, 1.0}}), InvalidInput);
}

TEST_CASE("analysis of the complete graph on four sites") {
    VotingKernel k4 = VotingKernel::complete(4);
    KernelAnalysis a = analyze(k4, 3);
    CHECK(a.r_modal[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.r_modal[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(a.r_modal[2] == doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(a.r_modal[3] == doctest::Approx(2.0 / 9).epsilon(1e-13));
    for (double mass : a.r_modal_mass) CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(a.spectral_gap == doctest::Approx(4.0 / 3).epsilon(1e-12));
    CHECK(a.nu_total == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(a.mixing_time_bound ==
          doctest::Approx(std::log(2.0 * std::exp(1.0) / 0.25) / a.absolute_gap).epsilon(1e-12));
}

TEST_CASE("return probabilities on locally tree-like regular graphs") {
    VotingKernel pet = VotingKernel::petersen();
    CHECK(pet.regular_degree() == 3);
    KernelAnalysis a = analyze(pet, 3);
    CHECK(a.r_modal[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(a.r_modal[2] == doctest::Approx(1.0 / 3).epsilon(1e-13));
    // girth five: no closed walks of length three
    CHECK(a.r_modal[3] == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(a.r_modal_mass[3] == doctest::Approx(1.0).epsilon(1e-13));

    VotingKernel big = VotingKernel::random_regular(100, 3, 7);
    KernelAnalysis ab = analyze(big, 3);
    CHECK(ab.r_modal[2] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(ab.r_modal_mass[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ab.r_modal[3] == doctest::Approx(0.0).epsilon(1e-12)); // few or no triangles
}

TEST_CASE("power iteration fallback for generic kernels") {
    // degree-formula construction vs power iteration on the same matrix
    VotingKernel byDegree = VotingKernel::from_weighted_graph(
        5, {{0, 1, 0.7}, {1, 2, 1.9}, {2, 3, 0.4}, {3, 4, 1.1}, {4, 0, 0.6}, {1, 3, 0.8}});
    VotingKernel byIteration = VotingKernel::from_matrix(byDegree.q());
    CHECK((byDegree.pi() - byIteration.pi()).cwiseAbs().maxCoeff() < 1e-11);

    // periodic chain: the lazy iteration still converges
    VotingKernel c6 = VotingKernel::from_matrix(VotingKernel::cycle(6).q());
    CHECK((c6.pi() - Eigen::VectorXd::Constant(6, 1.0 / 6)).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("kernel invariant battery") {
    Rng rng(2024);
    int rayleigh_checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        VotingKernel k = testutil::random_kernel(rng);
        const int n = k.size();

        // stationarity: pi q = pi
        Eigen::RowVectorXd residual = k.pi().transpose() * k.q() - k.pi().transpose();
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);

        // detailed balance (relative)
        for (int x = 0; x < n; ++x) {
            for (int y = x + 1; y < n; ++y) {
                double fxy = k.pi()(x) * k.q()(x, y);
                double fyx = k.pi()(y) * k.q()(y, x);
                CHECK(std::abs(fxy - fyx) <= 1e-9 * std::max({fxy, fyx, 1e-300}));
            }
        }

        if (trial % 10 == 0) {
            KernelAnalysis a = analyze(k, 4);
            CHECK(a.r_modal[0] == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(a.r_modal[1] == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(a.spectral_gap > 0.0);
            CHECK(a.spectral_gap <= 2.0 + 1e-12);
            CHECK(a.nu_total > 0.0);
            for (const auto& diag : a.return_probs) {
                CHECK(diag.minCoeff() >= -1e-12);
                CHECK(diag.maxCoeff() <= 1.0 + 1e-12);
            }
            // Rayleigh quotient of the symmetrized kernel on vectors
            // orthogonal to sqrt(pi) never exceeds the second eigenvalue
            Eigen::VectorXd sqrt_pi = k.pi().cwiseSqrt();
            Eigen::MatrixXd sym =
                sqrt_pi.asDiagonal() * k.q() * sqrt_pi.cwiseInverse().asDiagonal();
            sym = 0.5 * (sym + sym.transpose());
            for (int probe = 0; probe < 5; ++probe) {
                Eigen::VectorXd v(n);
                for (int i = 0; i < n; ++i) v(i) = rng.uniform() - 0.5;
                v -= sqrt_pi * (sqrt_pi.dot(v) / sqrt_pi.squaredNorm());
                double norm2 = v.squaredNorm();
                if (norm2 < 1e-12) continue;
                double rayleigh = v.dot(sym * v) / norm2;
                CHECK(1.0 - rayleigh >= a.spectral_gap - 1e-9);
                ++rayleigh_checked;
            }
        }
    }
    CHECK(rayleigh_checked > 100);
}

TEST_CASE("neighbor sampling matches the transition row") {
    VotingKernel k4 = VotingKernel::complete(4);
    CHECK(k4.sample_neighbor(0, 0.0) == 1);
    CHECK(k4.sample_neighbor(0, 0.34) == 2);
    CHECK(k4.sample_neighbor(0, 0.99) == 3);

    VotingKernel path = VotingKernel::from_weighted_graph(3, {{0, 1, 1.0}, {1, 2, 3.0}});
    CHECK(path.sample_neighbor(1, 0.1) == 0);  // weight 1/4
    CHECK(path.sample_neighbor(1, 0.9) == 2);  // weight 3/4
}
