#include "wfgame/simulate.hpp"

#include <cmath>

#include "wfgame/rng.hpp"

namespace wfgame {

SamplingSchedule SamplingSchedule::grid(double step, int count, int max_ell) {
    if (step <= 0.0 || count < 0) throw InvalidInput("sampling grid: need step > 0 and count >= 0");
    SamplingSchedule s;
    s.max_ell = max_ell;
    for (int i = 1; i <= count; ++i) s.times.push_back(step * i);
    return s;
}

namespace {

// Replica state: configuration plus caches that the event loop keeps
// incrementally consistent (pi-weighted density and per-site total payoffs).
class Replica {
public:
    Replica(const VotingKernel& kernel, const GameParams& params, const Configuration& initial,
            bool needs_payoffs)
        : kernel_(kernel), params_(params), xi_(initial), needs_payoffs_(needs_payoffs) {
        const int n = kernel_.size();
        p1_ = 0.0;
        for (int x = 0; x < n; ++x) {
            if (xi_.get(x)) p1_ += kernel_.pi()(x);
        }
        if (needs_payoffs_) {
            pay_.resize(n);
            for (int x = 0; x < n; ++x) pay_[x] = payoff_of(x);
        }
    }

    const Configuration& config() const { return xi_; }
    double p1() const { return p1_; }

    double payoff_cached(int y) const { return pay_[y]; }

    // B(y) = 1 - payoff(y); A(x) = sum_z q(x,z) B(z)
    double field_b(int y) const { return 1.0 - pay_[y]; }
    double field_a(int x) const {
        double acc = 0.0;
        for (int z : kernel_.neighbors(x)) acc += kernel_.q()(x, z) * pay_[z];
        return 1.0 - acc;
    }

    // Parent site for a replacement event at x under the game law.
    int sample_game_parent(int x, Rng& rng) const {
        const auto& nbrs = kernel_.neighbors(x);
        double total = 0.0;
        weights_.resize(nbrs.size());
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            int y = nbrs[i];
            double f = (1.0 - params_.w) + params_.w * pay_[y];
            total += kernel_.q()(x, y) * f;
            weights_[i] = total;
        }
        double u = rng.uniform() * total;
        std::size_t lo = 0, hi = nbrs.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (weights_[mid] <= u) lo = mid + 1; else hi = mid;
        }
        return nbrs[lo];
    }

    void set_type(int x, int value) {
        int old = xi_.get(x);
        if (old == value) return;
        xi_.set(x, value);
        p1_ += kernel_.pi()(x) * (value - old);
        if (needs_payoffs_) {
            for (int z : kernel_.neighbors(x)) {
                pay_[z] += kernel_.q()(z, x) *
                           (params_.payoff(xi_.get(z), value) - params_.payoff(xi_.get(z), old));
            }
            pay_[x] = payoff_of(x);
        }
    }

private:
    double payoff_of(int x) const {
        const int sx = xi_.get(x);
        double acc = 0.0;
        for (int y : kernel_.neighbors(x)) acc += kernel_.q()(x, y) * params_.payoff(sx, xi_.get(y));
        return acc;
    }

    const VotingKernel& kernel_;
    const GameParams& params_;
    Configuration xi_;
    bool needs_payoffs_;
    double p1_ = 0.0;
    std::vector<double> pay_;
    mutable std::vector<double> weights_;
};

TrajectoryRecord run(const VotingKernel& kernel, const GameParams& params,
                     const Configuration& initial, const StopRule& stop,
                     const SamplingSchedule& sampling, std::uint64_t seed, bool weighted) {
    params.validate();
    if (initial.size() != kernel.size()) {
        throw InvalidInput("simulate: initial configuration size does not match the kernel");
    }
    const bool mutating = params.mu_total() > 0.0;
    if (stop.at_absorption && mutating) {
        throw InvalidInput("simulate: absorption stop requires zero mutation rates");
    }
    for (std::size_t i = 1; i < sampling.times.size(); ++i) {
        if (sampling.times[i] <= sampling.times[i - 1]) {
            throw InvalidInput("simulate: sample times must be increasing");
        }
    }

    const int n = kernel.size();
    const bool track_payoffs = weighted ? true : params.w > 0.0;
    Replica state(kernel, params, initial, track_payoffs);
    Rng rng(seed);

    TrajectoryRecord rec;
    rec.weighted = weighted;
    double t = 0.0;
    double logw = 0.0;
    std::size_t next_sample = 0;

    auto emit_sample = [&](double at) {
        rec.sample_times.push_back(at);
        rec.p1.push_back(state.p1());
        if (sampling.max_ell > 0) {
            std::vector<double> ws(sampling.max_ell);
            for (int ell = 1; ell <= sampling.max_ell; ++ell) {
                ws[ell - 1] = w_ell(state.config(), kernel, ell);
            }
            rec.w_ell.push_back(std::move(ws));
        }
        if (weighted) rec.log_weight.push_back(logw);
    };
    auto emit_due_samples = [&](double up_to) {
        while (next_sample < sampling.times.size() && sampling.times[next_sample] <= up_to &&
               sampling.times[next_sample] <= stop.horizon) {
            emit_sample(sampling.times[next_sample]);
            ++next_sample;
        }
    };
    auto finish = [&](double at) {
        rec.final_time = at;
        rec.final_p1 = state.p1();
        rec.final_log_weight = logw;
        rec.final_config = state.config();
        return rec;
    };
    auto absorbed = [&]() { return state.config().is_all_ones() || state.config().is_all_zeros(); };
    auto record_absorption = [&](double at) {
        rec.absorption = Absorption{state.config().is_all_ones() ? 1 : 0, at};
    };

    if (!mutating && absorbed()) {
        record_absorption(0.0);
        if (stop.at_absorption) {
            emit_sample(0.0);
            return finish(0.0);
        }
        emit_due_samples(stop.horizon);
        return finish(std::isfinite(stop.horizon) ? stop.horizon : 0.0);
    }

    const double site_rate = 1.0 + params.mu_total();
    const double total_rate = n * site_rate;

    while (true) {
        double dt = rng.exponential(total_rate);
        double t_event = t + dt;
        emit_due_samples(std::min(t_event, stop.horizon));
        if (t_event > stop.horizon) return finish(stop.horizon);
        t = t_event;

        int x = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        double which = rng.uniform() * site_rate;
        if (which < 1.0) {
            // replacement event
            if (weighted) {
                int y = kernel.sample_neighbor(x, rng.uniform());
                // log q^w/q = log(1 - wB(y)) - log(1 - wA(x)), at the pre-event state
                if (params.w > 0.0) {
                    logw += std::log1p(-params.w * state.field_b(y)) -
                            std::log1p(-params.w * state.field_a(x));
                }
                state.set_type(x, state.config().get(y));
            } else if (params.w > 0.0) {
                int y = state.sample_game_parent(x, rng);
                state.set_type(x, state.config().get(y));
            } else {
                int y = kernel.sample_neighbor(x, rng.uniform());
                state.set_type(x, state.config().get(y));
            }
        } else if (which < 1.0 + params.mu1) {
            state.set_type(x, 1);
        } else {
            state.set_type(x, 0);
        }

        if (!mutating && absorbed()) {
            record_absorption(t);
            if (stop.at_absorption) {
                emit_sample(t);
                return finish(t);
            }
            // frozen from now on: emit the remaining grid and stop
            emit_due_samples(stop.horizon);
            return finish(std::isfinite(stop.horizon) ? stop.horizon : t);
        }
    }
}

} // namespace

TrajectoryRecord simulate_game(const VotingKernel& kernel, const GameParams& params,
                               const Configuration& initial, const StopRule& stop,
                               const SamplingSchedule& sampling, std::uint64_t seed) {
    return run(kernel, params, initial, stop, sampling, seed, false);
}

TrajectoryRecord simulate_voter_weighted(const VotingKernel& kernel, const GameParams& params,
                                         const Configuration& initial, const StopRule& stop,
                                         const SamplingSchedule& sampling, std::uint64_t seed) {
    return run(kernel, params, initial, stop, sampling, seed, true);
}

} // namespace wfgame
