#include "wfgame/dual.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wfgame/ensemble.hpp"
#include "wfgame/simulate.hpp"
#include "wfgame/stats.hpp"

namespace wfgame {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) / static_cast<double>(v.size()));
}

double z_score(double a, double se_a, double b, double se_b) {
    double denom = std::sqrt(se_a * se_a + se_b * se_b);
    if (denom == 0.0) return a == b ? 0.0 : std::numeric_limits<double>::infinity();
    return (a - b) / denom;
}

} // namespace

CoalescingRun simulate_coalescing(const VotingKernel& kernel, const std::vector<int>& start_sites,
                                  double horizon, std::uint64_t seed,
                                  const std::vector<double>& sample_times) {
    Rng rng(seed);
    return simulate_coalescing(kernel, start_sites, horizon, rng, sample_times);
}

CoalescingRun simulate_coalescing(const VotingKernel& kernel, const std::vector<int>& start_sites,
                                  double horizon, Rng& rng,
                                  const std::vector<double>& sample_times) {
    if (start_sites.empty()) throw InvalidInput("coalescing chains: empty start list");
    const int n = kernel.size();

    CoalescentState state;
    std::vector<int> occupant(n, -1); // site -> block index
    for (std::size_t label = 0; label < start_sites.size(); ++label) {
        int site = start_sites[label];
        if (site < 0 || site >= n) throw InvalidInput("coalescing chains: site out of range");
        if (occupant[site] >= 0) {
            state.blocks[occupant[site]].push_back(static_cast<int>(label)); // duplicates merge at time 0
        } else {
            occupant[site] = static_cast<int>(state.blocks.size());
            state.blocks.push_back({static_cast<int>(label)});
            state.block_sites.push_back(site);
        }
    }

    CoalescingRun run;
    const std::size_t m0 = start_sites.size();
    run.c_times.assign(m0, std::numeric_limits<double>::infinity());
    for (std::size_t k = state.blocks.size(); k <= m0; ++k) run.c_times[k - 1] = 0.0;

    double t = 0.0;
    std::size_t next_sample = 0;
    auto emit_snapshots = [&](double up_to) {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= up_to) {
            CoalescentState snap = state;
            snap.time = sample_times[next_sample];
            run.snapshots.push_back(std::move(snap));
            ++next_sample;
        }
    };

    while (true) {
        // a single surviving block still walks, but with an infinite horizon
        // there is nothing left to resolve
        if (state.blocks.size() == 1 && !std::isfinite(horizon)) break;
        double rate = static_cast<double>(state.blocks.size());
        double t_event = t + rng.exponential(rate);
        emit_snapshots(std::min(t_event, horizon));
        if (t_event > horizon) {
            t = horizon;
            break;
        }
        t = t_event;
        auto mover = static_cast<std::size_t>(rng.uniform_int(state.blocks.size()));
        int from = state.block_sites[mover];
        int to = kernel.sample_neighbor(from, rng.uniform());
        occupant[from] = -1;
        int target = occupant[to];
        if (target >= 0) {
            // merge mover into the block already at `to`, then swap-remove it
            auto& dst = state.blocks[static_cast<std::size_t>(target)];
            dst.insert(dst.end(), state.blocks[mover].begin(), state.blocks[mover].end());
            std::size_t last = state.blocks.size() - 1;
            if (mover != last) {
                state.blocks[mover] = std::move(state.blocks[last]);
                state.block_sites[mover] = state.block_sites[last];
                occupant[state.block_sites[mover]] = static_cast<int>(mover);
            }
            state.blocks.pop_back();
            state.block_sites.pop_back();
            run.c_times[state.blocks.size() - 1] = t;
        } else {
            occupant[to] = static_cast<int>(mover);
            state.block_sites[mover] = to;
        }
    }
    emit_snapshots(horizon);
    state.time = t;
    run.final_state = std::move(state);
    return run;
}

// ---------------------------------------------------------------------------
// exact pair solvers

namespace {

// Applies M -> 2M - qM - Mq^T restricted to off-diagonal matrices.
Eigen::MatrixXd pair_operator(const Eigen::MatrixXd& q, const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out = 2.0 * m - q * m - m * q.transpose();
    out.diagonal().setZero();
    return out;
}

double weighted_dot(const Eigen::MatrixXd& w, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (w.array() * a.array() * b.array()).sum();
}

} // namespace

Eigen::MatrixXd pair_occupation_solve(const VotingKernel& kernel, const Eigen::MatrixXd& h) {
    const int n = kernel.size();
    if (h.rows() != n || h.cols() != n) {
        throw InvalidInput("pair occupation solve: source size mismatch");
    }
    const Eigen::MatrixXd& q = kernel.q();
    Eigen::MatrixXd weight = kernel.pi() * kernel.pi().transpose();
    weight.diagonal().setZero();

    Eigen::MatrixXd rhs = h;
    rhs.diagonal().setZero();
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());

    // Conjugate gradients in the pi(x)pi(y) inner product; the absorbed
    // pair operator is self-adjoint and positive definite there.
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd r = rhs;
    Eigen::MatrixXd p = r;
    double rs = weighted_dot(weight, r, r);
    auto converged = [&]() {
        // true residual guards against floating-point drift in r
        Eigen::MatrixXd res = rhs - pair_operator(q, x);
        return res.cwiseAbs().maxCoeff() <= 1e-12 * scale;
    };
    const long max_iter = 200000;
    for (long it = 0; it < max_iter; ++it) {
        if ((it % 25 == 0 || rs == 0.0) && converged()) return x;
        if (rs == 0.0) break;
        Eigen::MatrixXd ap = pair_operator(q, p);
        double pap = weighted_dot(weight, p, ap);
        if (pap <= 0.0) break; // exact subspace exhausted
        double alpha = rs / pap;
        x += alpha * p;
        r -= alpha * ap;
        double rs_next = weighted_dot(weight, r, r);
        p = r + (rs_next / rs) * p;
        rs = rs_next;
    }
    if (converged()) return x;
    throw SimulationError("pair occupation solve: conjugate gradients did not converge");
}

MeetingTable meeting_times_exact(const VotingKernel& kernel) {
    const int n = kernel.size();
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
    ones.diagonal().setZero();
    Eigen::MatrixXd m = pair_occupation_solve(kernel, ones);
    m = 0.5 * (m + m.transpose());
    MeetingTable out;
    out.max_residual = (ones - pair_operator(kernel.q(), m)).cwiseAbs().maxCoeff();
    out.m = std::move(m);
    return out;
}

double gamma_timescale(const VotingKernel& kernel, const MeetingTable& table) {
    return kernel.pi().dot(table.m * kernel.pi());
}

double gamma_timescale(const VotingKernel& kernel) {
    return gamma_timescale(kernel, meeting_times_exact(kernel));
}

IdentityCheck meeting_identity_check(const VotingKernel& kernel, const MeetingTable& table) {
    const int n = kernel.size();
    IdentityCheck out;
    for (int x = 0; x < n; ++x) {
        double pi2 = kernel.pi()(x) * kernel.pi()(x);
        for (int y : kernel.neighbors(x)) out.lhs += pi2 * kernel.q()(x, y) * table.m(x, y);
    }
    out.rhs = (1.0 - kernel.pi().squaredNorm()) / 2.0;
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

int PairGreen::index(int x, int y) const {
    if (x == y || x < 0 || y < 0 || x >= n || y >= n) {
        throw InvalidInput("pair green: not an off-diagonal pair");
    }
    return x * (n - 1) + (y > x ? y - 1 : y);
}

PairGreen pair_green(const VotingKernel& kernel) {
    const int n = kernel.size();
    const int d = n * (n - 1);
    if (n > 46) {
        throw InvalidInput("pair green: dense ordered-pair table limited to n <= 46; "
                           "use pair_occupation_solve for larger kernels");
    }
    PairGreen out;
    out.n = n;
    out.pairs.reserve(d);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x != y) out.pairs.emplace_back(x, y);
        }
    }
    auto idx = [&](int x, int y) { return x * (n - 1) + (y > x ? y - 1 : y); };
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (int s = 0; s < d; ++s) {
        auto [x, y] = out.pairs[static_cast<std::size_t>(s)];
        a(s, s) = 2.0;
        for (int z : kernel.neighbors(x)) {
            if (z != y) a(s, idx(z, y)) -= kernel.q()(x, z);
        }
        for (int z : kernel.neighbors(y)) {
            if (z != x) a(s, idx(x, z)) -= kernel.q()(y, z);
        }
    }
    out.g = a.partialPivLu().solve(Eigen::MatrixXd::Identity(d, d));
    return out;
}

// ---------------------------------------------------------------------------
// initial laws and the exact first-order coefficient

InitialLaw InitialLaw::point(Configuration config) {
    InitialLaw law;
    law.kind_ = Kind::Point;
    law.config_ = std::move(config);
    return law;
}

InitialLaw InitialLaw::uniform_ones(int m) {
    if (m < 0) throw InvalidInput("initial law: negative count of ones");
    InitialLaw law;
    law.kind_ = Kind::UniformOnes;
    law.m_ = m;
    return law;
}

InitialLaw InitialLaw::product(double density) {
    if (density < 0.0 || density > 1.0) throw InvalidInput("initial law: density outside [0,1]");
    InitialLaw law;
    law.kind_ = Kind::Product;
    law.constant_ = true;
    law.constant_density_ = density;
    return law;
}

InitialLaw InitialLaw::product(Eigen::VectorXd densities) {
    if (densities.minCoeff() < 0.0 || densities.maxCoeff() > 1.0) {
        throw InvalidInput("initial law: density outside [0,1]");
    }
    InitialLaw law;
    law.kind_ = Kind::Product;
    law.densities_ = std::move(densities);
    return law;
}

Eigen::MatrixXd InitialLaw::cross_moments(int n) const {
    Eigen::MatrixXd h(n, n);
    switch (kind_) {
        case Kind::Point: {
            if (config_->size() != n) throw InvalidInput("initial law: configuration size mismatch");
            for (int u = 0; u < n; ++u) {
                for (int v = 0; v < n; ++v) {
                    h(u, v) = config_->get(u) * (1 - config_->get(v));
                }
            }
            break;
        }
        case Kind::UniformOnes: {
            if (m_ > n) throw InvalidInput("initial law: more ones than sites");
            double value = static_cast<double>(m_) * (n - m_) / (static_cast<double>(n) * (n - 1));
            h.setConstant(value);
            break;
        }
        case Kind::Product: {
            Eigen::VectorXd p = constant_ ? Eigen::VectorXd::Constant(n, constant_density_)
                                          : densities_;
            if (p.size() != n) throw InvalidInput("initial law: density vector size mismatch");
            h = p * (Eigen::VectorXd::Ones(n) - p).transpose();
            break;
        }
    }
    h.diagonal().setZero(); // xi(u)(1 - xi(u)) vanishes pointwise
    return h;
}

double InitialLaw::mean_density(const VotingKernel& kernel) const {
    switch (kind_) {
        case Kind::Point: {
            double acc = 0.0;
            for (int x = 0; x < kernel.size(); ++x) {
                if (config_->get(x)) acc += kernel.pi()(x);
            }
            return acc;
        }
        case Kind::UniformOnes:
            return static_cast<double>(m_) / kernel.size();
        case Kind::Product:
            return constant_ ? constant_density_ : kernel.pi().dot(densities_);
    }
    return 0.0;
}

double first_order_coefficient(const VotingKernel& kernel, const PayoffMatrix& payoff,
                               const InitialLaw& initial) {
    if (!payoff.is_additive()) {
        throw InvalidInput("first order coefficient: needs a payoff matrix without an "
                           "interaction cross-term (p11 - p10 - p01 + p00 = 0)");
    }
    const int n = kernel.size();
    // Dbar = h (W_3 - W_1) + g W_2 with h, g the partner/self payoff slopes
    const double h_coef = payoff(0, 1) - payoff(0, 0);
    const double g_coef = payoff(1, 0) - payoff(0, 0);

    Eigen::MatrixXd moments = initial.cross_moments(n);
    // F(x,y) = E[ integral of xi_s(x)(1-xi_s(y)) ds ] by moment duality
    Eigen::MatrixXd f = pair_occupation_solve(kernel, moments);

    Eigen::MatrixXd power = kernel.q();
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;
    auto contract = [&](const Eigen::MatrixXd& qpow) {
        return (kernel.pi().asDiagonal() * qpow).cwiseProduct(f).sum();
    };
    g1 = contract(power);
    power = power * kernel.q();
    g2 = contract(power);
    power = power * kernel.q();
    g3 = contract(power);
    return h_coef * (g3 - g1) + g_coef * g2;
}

double first_order_regular_closed_form(int n, int k, double b, double c, int m) {
    return static_cast<double>(m) * (n - m) / (2.0 * n * (n - 1)) *
           (b * (n - 2 * k) - c * k * (n - 2));
}

// ---------------------------------------------------------------------------
// Monte Carlo duality checks

DualityCheck duality_check_moment(const VotingKernel& kernel, const Configuration& initial,
                                  const std::vector<int>& sites, double t, std::size_t replicas,
                                  std::uint64_t seed, int threads) {
    if (sites.empty()) throw InvalidInput("moment duality check: empty site set");
    if (replicas == 0) throw InvalidInput("moment duality check: need at least one replica");
    for (int x : sites) {
        if (x < 0 || x >= kernel.size()) throw InvalidInput("moment duality check: site out of range");
    }
    GameParams neutral;
    auto voter = run_ensemble(replicas, seed, [&](std::size_t, Rng& rng) {
        TrajectoryRecord rec = simulate_game(kernel, neutral, initial, StopRule::until(t),
                                             SamplingSchedule::none(), rng.raw());
        double prod = 1.0;
        for (int x : sites) prod *= rec.final_config.get(x);
        return prod;
    }, threads);
    auto dual = run_ensemble(replicas, seed ^ 0x636f616cULL, [&](std::size_t, Rng& rng) {
        CoalescingRun run = simulate_coalescing(kernel, sites, t, rng);
        double prod = 1.0;
        for (std::size_t blk = 0; blk < run.final_state.blocks.size(); ++blk) {
            prod *= initial.get(run.final_state.block_sites[blk]);
        }
        return prod;
    }, threads);

    DualityCheck out;
    out.voter_estimate = mean_of(voter);
    out.voter_se = se_of(voter, out.voter_estimate);
    out.dual_estimate = mean_of(dual);
    out.dual_se = se_of(dual, out.dual_estimate);
    out.z_score = z_score(out.voter_estimate, out.voter_se, out.dual_estimate, out.dual_se);
    return out;
}

DualityCheck duality_check_fk(const VotingKernel& kernel, double mu1, double mu0,
                              const Configuration& initial, int x, int y, double t,
                              std::size_t replicas, std::uint64_t seed, int threads) {
    if (mu1 < 0.0 || mu0 < 0.0 || mu1 + mu0 <= 0.0) {
        throw InvalidInput("feynman-kac duality check: needs mu1 + mu0 > 0 "
                           "(use the moment duality check when mutation is absent)");
    }
    if (x < 0 || x >= kernel.size() || y < 0 || y >= kernel.size()) {
        throw InvalidInput("feynman-kac duality check: site out of range");
    }
    if (replicas == 0) throw InvalidInput("feynman-kac duality check: need at least one replica");
    const double mu = mu1 + mu0;
    const double mubar1 = mu1 / mu, mubar0 = mu0 / mu;
    auto h_fn = [&](int site_x, int site_y) {
        return (initial.get(site_x) - mubar1) * (1.0 - initial.get(site_y) - mubar0);
    };

    GameParams params;
    params.mu1 = mu1;
    params.mu0 = mu0;
    auto voter = run_ensemble(replicas, seed, [&](std::size_t, Rng& rng) {
        TrajectoryRecord rec = simulate_game(kernel, params, initial, StopRule::until(t),
                                             SamplingSchedule::none(), rng.raw());
        return (rec.final_config.get(x) - mubar1) * (1.0 - rec.final_config.get(y) - mubar0);
    }, threads);

    auto dual = run_ensemble(replicas, seed ^ 0x666b6475ULL, [&](std::size_t, Rng& rng) {
        // coalescing pair from (x, y); the meeting time drives both the
        // exponential weight and the diagonal correction
        std::vector<int> starts{x, y};
        CoalescingRun run = simulate_coalescing(kernel, starts, t, rng);
        double meet = (x == y) ? 0.0 : run.c_times[0];
        int site_x = -1, site_y = -1;
        for (std::size_t blk = 0; blk < run.final_state.blocks.size(); ++blk) {
            for (int label : run.final_state.blocks[blk]) {
                if (label == 0) site_x = run.final_state.block_sites[blk];
                if (label == 1) site_y = run.final_state.block_sites[blk];
            }
        }
        double weight = std::exp(-mu * (t + std::min(meet, t)));
        double value = h_fn(site_x, site_y) * weight;
        if (meet < t) {
            // integral over s in [meet, t] of exp(-mu (s + meet)) ds
            double corr = std::exp(-mu * meet) * (std::exp(-mu * meet) - std::exp(-mu * t)) / mu;
            value -= mu * mubar1 * mubar0 * corr;
        }
        return value;
    }, threads);

    DualityCheck out;
    out.voter_estimate = mean_of(voter);
    out.voter_se = se_of(voter, out.voter_estimate);
    out.dual_estimate = mean_of(dual);
    out.dual_se = se_of(dual, out.dual_estimate);
    out.z_score = z_score(out.voter_estimate, out.voter_se, out.dual_estimate, out.dual_se);
    return out;
}

CoalescentSpectrum coalescent_spectrum(const VotingKernel& kernel, std::size_t replicas,
                                       std::uint64_t seed, int max_ell, int threads) {
    if (replicas == 0) throw InvalidInput("coalescent spectrum: need at least one replica");
    if (max_ell < 1) throw InvalidInput("coalescent spectrum: need max_ell >= 1");
    const int n = kernel.size();
    if (max_ell >= n) throw InvalidInput("coalescent spectrum: max_ell must be below the site count");

    CoalescentSpectrum out;
    out.gamma = gamma_timescale(kernel);

    std::vector<int> all_sites(n);
    for (int i = 0; i < n; ++i) all_sites[i] = i;
    auto paths = run_ensemble(replicas, seed, [&](std::size_t, Rng& rng) {
        CoalescingRun run = simulate_coalescing(
            kernel, all_sites, std::numeric_limits<double>::infinity(), rng);
        std::vector<double> c(max_ell);
        for (int ell = 1; ell <= max_ell; ++ell) c[ell - 1] = run.c_times[ell - 1] / out.gamma;
        return c;
    }, threads);

    // limiting functional: sum over m > ell of 2 e_m / (m(m-1)), sampled
    // with truncation at m = 1000 (the tail is replaced by its mean 2/m)
    const int truncation = 1000;
    auto reference = run_ensemble(replicas, seed ^ 0x6b696e67ULL, [&](std::size_t, Rng& rng) {
        std::vector<double> c(max_ell, 2.0 / truncation);
        for (int m = truncation; m >= 2; --m) {
            double e = rng.exponential(1.0) * 2.0 / (static_cast<double>(m) * (m - 1));
            for (int ell = 1; ell <= std::min(max_ell, m - 1); ++ell) c[ell - 1] += e;
        }
        return c;
    }, threads);

    for (int ell = 1; ell <= max_ell; ++ell) {
        std::vector<double> sample(replicas), ref(replicas);
        for (std::size_t i = 0; i < replicas; ++i) {
            sample[i] = paths[i][ell - 1];
            ref[i] = reference[i][ell - 1];
        }
        double mean = mean_of(sample);
        out.samples.push_back(sample);
        out.sample_mean.push_back(mean);
        out.sample_se.push_back(se_of(sample, mean));
        out.reference_mean.push_back(2.0 / ell);
        out.ks_statistic.push_back(two_sample_ks(sample, ref));
    }
    return out;
}

} // namespace wfgame
