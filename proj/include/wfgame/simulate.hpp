#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "wfgame/configuration.hpp"
#include "wfgame/game.hpp"
#include "wfgame/kernel.hpp"

namespace wfgame {

struct StopRule {
    bool at_absorption = false;
    double horizon = std::numeric_limits<double>::infinity();

    static StopRule until(double t) { return StopRule{false, t}; }
    static StopRule absorption(double max_time = std::numeric_limits<double>::infinity()) {
        return StopRule{true, max_time};
    }
};

struct SamplingSchedule {
    std::vector<double> times; // increasing sample times
    int max_ell = 0;           // also record W_1..W_max_ell at each sample

    static SamplingSchedule none() { return {}; }
    static SamplingSchedule grid(double step, int count, int max_ell = 0);
};

struct Absorption {
    int boundary = 0; // 1 for the all-ones state, 0 for the all-zeros state
    double time = 0.0;
};

/// Observable samples and absorption metadata from one replica.
struct TrajectoryRecord {
    std::vector<double> sample_times;
    std::vector<double> p1;
    std::vector<std::vector<double>> w_ell; // per sample, size max_ell
    std::vector<double> log_weight;         // per sample, only when weights are tracked
    std::optional<Absorption> absorption;
    Configuration final_config = Configuration(1);
    double final_time = 0.0;
    double final_p1 = 0.0;
    double final_log_weight = 0.0;
    bool weighted = false;
};

// Evolutionary game with death-birth updating: every site resamples its
// type at rate 1 from the fitness-weighted replacement distribution, plus
// per-site mutation events at rates (mu1, mu0). Exact in law.
TrajectoryRecord simulate_game(const VotingKernel& kernel, const GameParams& params,
                               const Configuration& initial, const StopRule& stop,
                               const SamplingSchedule& sampling, std::uint64_t seed);

// Neutral voter dynamics (selection plays no role in the transitions) while
// accumulating the log likelihood ratio of the game law against the voter
// law: every ordered-pair replacement event (x <- y) contributes
// log q^w(x,y,xi-) - log q(x,y), with no drift correction because the
// normalized replacement rates sum to the voter rates.
TrajectoryRecord simulate_voter_weighted(const VotingKernel& kernel, const GameParams& params,
                                         const Configuration& initial, const StopRule& stop,
                                         const SamplingSchedule& sampling, std::uint64_t seed);

} // namespace wfgame
