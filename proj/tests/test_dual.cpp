#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wfgame/dual.hpp"
#include "wfgame/ensemble.hpp"

using namespace wfgame;

TEST_CASE("coalescing chains: degenerate starts") {
    VotingKernel k4 = VotingKernel::complete(4);
    CHECK_THROWS_AS(simulate_coalescing(k4, {}, 1.0, 1), InvalidInput);

    CoalescingRun single = simulate_coalescing(k4, {2}, 5.0, 1);
    CHECK(single.c_times[0] == 0.0);
    CHECK(single.final_state.blocks.size() == 1);

    // duplicated starts merge at time zero
    CoalescingRun dup = simulate_coalescing(k4, {1, 1, 3}, 0.0, 1);
    CHECK(dup.final_state.blocks.size() == 2);
    CHECK(dup.c_times[1] == 0.0);
}

TEST_CASE("coalescing chains: block counts shrink and labels survive") {
    VotingKernel pet = VotingKernel::petersen();
    std::vector<int> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (int rep = 0; rep < 50; ++rep) {
        CoalescingRun run = simulate_coalescing(pet, all, std::numeric_limits<double>::infinity(),
                                                derive_seed(5, rep));
        REQUIRE(run.final_state.blocks.size() == 1);
        CHECK(run.final_state.blocks[0].size() == 10);
        // c_times decrease with the block count and end at full coalescence
        for (std::size_t k = 1; k < run.c_times.size(); ++k) {
            CHECK(run.c_times[k - 1] >= run.c_times[k]);
        }
    }
}

TEST_CASE("pairwise meeting on the two-site kernel") {
    VotingKernel k2 = VotingKernel::complete(2);
    const std::size_t replicas = 10000;
    auto times = run_ensemble(replicas, 42, [&](std::size_t, Rng& rng) {
        CoalescingRun run = simulate_coalescing(k2, {0, 1},
                                                std::numeric_limits<double>::infinity(), rng);
        return run.c_times[0];
    });
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(replicas);
    // exponential race at combined rate 2
    double se = 0.5 / std::sqrt(static_cast<double>(replicas));
    CHECK(std::abs(mean - 0.5) < 3.0 * se);
}

TEST_CASE("exact meeting times") {
    for (int n : {2, 4, 7, 30}) {
        VotingKernel k = VotingKernel::complete(n);
        MeetingTable table = meeting_times_exact(k);
        CHECK(table.max_residual < 1e-10);
        for (int x = 0; x < n; ++x) {
            CHECK(table.m(x, x) == 0.0);
            for (int y = 0; y < n; ++y) {
                if (x != y) {
                    CHECK(table.m(x, y) == doctest::Approx((n - 1) / 2.0).epsilon(1e-10));
                    CHECK(table.m(x, y) == doctest::Approx(table.m(y, x)).epsilon(1e-12));
                }
            }
        }
    }

    // gambler's ruin values on the four-cycle
    VotingKernel c4 = VotingKernel::cycle(4);
    MeetingTable table = meeting_times_exact(c4);
    CHECK(table.m(0, 1) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(table.m(0, 2) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(table.m(0, 3) == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("meeting times on irregular kernels stay positive and symmetric") {
    Rng rng(909);
    for (int trial = 0; trial < 25; ++trial) {
        VotingKernel k = testutil::random_kernel(rng, 3, 9);
        MeetingTable table = meeting_times_exact(k);
        CHECK(table.max_residual < 1e-10);
        for (int x = 0; x < k.size(); ++x) {
            for (int y = x + 1; y < k.size(); ++y) {
                CHECK(table.m(x, y) > 0.0);
                CHECK(std::abs(table.m(x, y) - table.m(y, x)) < 1e-10);
            }
        }
        IdentityCheck id = meeting_identity_check(k, table);
        CHECK(id.residual < 1e-10);
    }
}

TEST_CASE("diffusion time scale") {
    VotingKernel k4 = VotingKernel::complete(4);
    MeetingTable table4 = meeting_times_exact(k4);
    CHECK(gamma_timescale(k4, table4) == doctest::Approx(9.0 / 8).epsilon(1e-11));

    IdentityCheck id = meeting_identity_check(k4, table4);
    CHECK(id.lhs == doctest::Approx(3.0 / 8).epsilon(1e-11));
    CHECK(id.rhs == doctest::Approx(3.0 / 8).epsilon(1e-13));
    CHECK(id.residual < 1e-10);

    VotingKernel c4 = VotingKernel::cycle(4);
    CHECK(gamma_timescale(c4) == doctest::Approx(5.0 / 4).epsilon(1e-11));

    for (int n : {50, 200}) {
        VotingKernel k = VotingKernel::complete(n);
        CHECK(gamma_timescale(k) ==
              doctest::Approx((n - 1.0) * (n - 1.0) / (2.0 * n)).epsilon(1e-9));
    }
}

TEST_CASE("meeting identity on the standard test kernels") {
    std::vector<VotingKernel> kernels;
    kernels.push_back(VotingKernel::complete(6));
    kernels.push_back(VotingKernel::cycle(8));
    kernels.push_back(VotingKernel::petersen());
    kernels.push_back(VotingKernel::random_regular(30, 3, 11));
    for (const auto& k : kernels) {
        IdentityCheck id = meeting_identity_check(k, meeting_times_exact(k));
        CHECK(id.residual < 1e-10);
    }
}

TEST_CASE("pair green function") {
    VotingKernel k2 = VotingKernel::complete(2);
    PairGreen g2 = pair_green(k2);
    CHECK(g2.g(g2.index(0, 1), g2.index(0, 1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g2.g(g2.index(0, 1), g2.index(1, 0)) == doctest::Approx(0.0).epsilon(1e-12));

    // row sums reproduce meeting times; entries are occupation times
    for (const VotingKernel& k :
         {VotingKernel::complete(6), VotingKernel::cycle(6), VotingKernel::petersen()}) {
        PairGreen g = pair_green(k);
        MeetingTable table = meeting_times_exact(k);
        CHECK(g.g.minCoeff() > -1e-12);
        for (int x = 0; x < k.size(); ++x) {
            for (int y = 0; y < k.size(); ++y) {
                if (x == y) continue;
                CHECK(g.g.row(g.index(x, y)).sum() ==
                      doctest::Approx(table.m(x, y)).epsilon(1e-8));
            }
        }
    }

    // rotation invariance on the cycle
    VotingKernel c4 = VotingKernel::cycle(4);
    PairGreen g4 = pair_green(c4);
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
            if (x == y) continue;
            for (int u = 0; u < 4; ++u) {
                for (int v = 0; v < 4; ++v) {
                    if (u == v) continue;
                    double a = g4.g(g4.index(x, y), g4.index(u, v));
                    double b = g4.g(g4.index((x + 1) % 4, (y + 1) % 4),
                                    g4.index((u + 1) % 4, (v + 1) % 4));
                    CHECK(std::abs(a - b) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("implicit pair solver agrees with the dense green table") {
    VotingKernel c6 = VotingKernel::cycle(6);
    PairGreen g = pair_green(c6);
    Rng rng(13);
    Eigen::MatrixXd h(6, 6);
    for (int u = 0; u < 6; ++u) {
        for (int v = 0; v < 6; ++v) h(u, v) = u == v ? 0.0 : rng.uniform();
    }
    Eigen::MatrixXd f = pair_occupation_solve(c6, h);
    for (int x = 0; x < 6; ++x) {
        for (int y = 0; y < 6; ++y) {
            if (x == y) {
                CHECK(f(x, y) == 0.0);
                continue;
            }
            double via_table = 0.0;
            for (int u = 0; u < 6; ++u) {
                for (int v = 0; v < 6; ++v) {
                    if (u != v) via_table += g.g(g.index(x, y), g.index(u, v)) * h(u, v);
                }
            }
            CHECK(f(x, y) == doctest::Approx(via_table).epsilon(1e-9));
        }
    }
}

TEST_CASE("exact first-order coefficient on regular graphs") {
    VotingKernel k4 = VotingKernel::complete(4);
    PayoffMatrix payoff = PayoffMatrix::donation(5.0, 1.0);
    CHECK(first_order_coefficient(k4, payoff, InitialLaw::uniform_ones(1)) ==
          doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(first_order_coefficient(k4, payoff, InitialLaw::uniform_ones(2)) ==
          doctest::Approx(-8.0 / 3).epsilon(1e-9));
    CHECK(first_order_coefficient(k4, payoff, InitialLaw::uniform_ones(3)) ==
          doctest::Approx(-2.0).epsilon(1e-9));

    VotingKernel pet = VotingKernel::petersen();
    for (int m = 1; m <= 9; ++m) {
        double expected = first_order_regular_closed_form(10, 3, 5.0, 1.0, m);
        CHECK(std::abs(first_order_coefficient(pet, payoff, InitialLaw::uniform_ones(m)) -
                       expected) < 1e-8);
    }
    CHECK(first_order_regular_closed_form(10, 3, 5.0, 1.0, 5) == doctest::Approx(-5.0 / 9));

    // absorbing start and the neutral payoff vanish exactly
    CHECK(first_order_coefficient(k4, payoff,
                                  InitialLaw::point(Configuration::all_ones(4))) == 0.0);
    CHECK(first_order_coefficient(k4, PayoffMatrix::donation(0.0, 0.0),
                                  InitialLaw::uniform_ones(2)) == 0.0);

    PayoffMatrix crossed(1.0, 0.0, 0.0, 0.5); // p11 - p10 - p01 + p00 != 0
    CHECK_THROWS_AS(first_order_coefficient(k4, crossed, InitialLaw::uniform_ones(2)),
                    InvalidInput);
}

TEST_CASE("first-order coefficient via the dense green table route") {
    // same assembly through the explicit ordered-pair table
    VotingKernel k4 = VotingKernel::complete(4);
    PayoffMatrix payoff = PayoffMatrix::donation(5.0, 1.0);
    PairGreen g = pair_green(k4);
    InitialLaw law = InitialLaw::product(0.37);
    Eigen::MatrixXd h = law.cross_moments(4);

    Eigen::MatrixXd q1 = k4.q();
    Eigen::MatrixXd q2 = testutil::naive_power(k4.q(), 2);
    Eigen::MatrixXd q3 = testutil::naive_power(k4.q(), 3);
    auto contract = [&](const Eigen::MatrixXd& qpow) {
        double acc = 0.0;
        for (int x = 0; x < 4; ++x) {
            for (int y = 0; y < 4; ++y) {
                if (x == y) continue;
                double fxy = 0.0;
                for (int u = 0; u < 4; ++u) {
                    for (int v = 0; v < 4; ++v) {
                        if (u != v) fxy += g.g(g.index(x, y), g.index(u, v)) * h(u, v);
                    }
                }
                acc += k4.pi()(x) * qpow(x, y) * fxy;
            }
        }
        return acc;
    };
    double via_table = 5.0 * (contract(q3) - contract(q1)) - 1.0 * contract(q2);
    CHECK(first_order_coefficient(k4, payoff, law) == doctest::Approx(via_table).epsilon(1e-9));
}

TEST_CASE("moment duality at time zero is exact") {
    VotingKernel k6 = VotingKernel::complete(6);
    Configuration initial = Configuration::with_ones(6, {0, 2, 4});
    DualityCheck chk = duality_check_moment(k6, initial, {0, 2}, 0.0, 100, 7);
    CHECK(chk.voter_estimate == 1.0);
    CHECK(chk.dual_estimate == 1.0);
    CHECK(chk.z_score == 0.0);

    DualityCheck zero = duality_check_moment(k6, initial, {0, 1}, 0.0, 100, 7);
    CHECK(zero.voter_estimate == 0.0);
    CHECK(zero.dual_estimate == 0.0);

    CHECK_THROWS_AS(duality_check_moment(k6, initial, {}, 1.0, 100, 7), InvalidInput);
}

TEST_CASE("moment duality by monte carlo") {
    VotingKernel k6 = VotingKernel::complete(6);
    Configuration initial = Configuration::with_ones(6, {0, 2, 4});
    DualityCheck one = duality_check_moment(k6, initial, {0}, 1.0, 4000, 21);
    CHECK(std::abs(one.z_score) < 3.0);

    VotingKernel c6 = VotingKernel::cycle(6);
    Configuration init6 = Configuration::with_ones(6, {0, 1, 2});
    DualityCheck two = duality_check_moment(c6, init6, {0, 3}, 2.0, 4000, 22);
    CHECK(std::abs(two.z_score) < 3.0);
}

TEST_CASE("feynman-kac duality") {
    VotingKernel k4 = VotingKernel::complete(4);
    Configuration initial = Configuration::with_ones(4, {0, 1});

    CHECK_THROWS_AS(duality_check_fk(k4, 0.0, 0.0, initial, 0, 1, 1.0, 100, 7), InvalidInput);

    // coincident sites at time zero evaluate the dual function exactly
    DualityCheck same = duality_check_fk(k4, 0.5, 0.5, initial, 0, 0, 0.0, 200, 7);
    double expected = (1.0 - 0.5) * (0.0 - 0.5); // [xi(0) - 1/2][(1 - xi(0)) - 1/2]
    CHECK(same.voter_estimate == doctest::Approx(expected).epsilon(1e-12));
    CHECK(same.dual_estimate == doctest::Approx(expected).epsilon(1e-12));

    DualityCheck mc = duality_check_fk(k4, 0.5, 0.5, initial, 0, 1, 1.0, 5000, 23);
    CHECK(std::abs(mc.z_score) < 3.0);

    // pure 1-mutation: the population converges to all ones where H vanishes
    VotingKernel k5 = VotingKernel::complete(5);
    Configuration init5 = Configuration::with_ones(5, {0});
    DualityCheck late = duality_check_fk(k5, 1.0, 0.0, init5, 0, 1, 20.0, 2000, 29);
    CHECK(std::abs(late.voter_estimate) < 3.0 * late.voter_se + 0.01);
    CHECK(std::abs(late.z_score) < 3.5);
}

TEST_CASE("coalescent spectrum against the limiting exponential ladder") {
    VotingKernel k30 = VotingKernel::complete(30);
    CoalescentSpectrum spectrum = coalescent_spectrum(k30, 3000, 2025, 2);
    CHECK(spectrum.reference_mean[0] == doctest::Approx(2.0));
    CHECK(spectrum.reference_mean[1] == doctest::Approx(1.0));
    // on complete kernels the rescaled mean of the full coalescence time is
    // exactly 2
    CHECK(std::abs(spectrum.sample_mean[0] - 2.0) < 3.0 * spectrum.sample_se[0]);
    CHECK(spectrum.ks_statistic[0] < 0.1);
    CHECK(spectrum.samples[0].size() == 3000);
}
