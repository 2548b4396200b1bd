#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfgame/dual.hpp"
#include "wfgame/game.hpp"
#include "wfgame/kernel.hpp"

namespace wfgame {

/// How replicas draw their starting configuration.
struct InitialSpec {
    enum class Kind { UniformOnes, FixedOnes, BernoulliDensity };
    Kind kind = Kind::UniformOnes;
    int m = -1; // -1 resolves to n/2 at use
    std::vector<int> ones;
    double density = 0.5;

    int resolved_m(int n) const { return m >= 0 ? m : n / 2; }
    Configuration sample(int n, Rng& rng) const;
    // deterministic representative (ones packed at the lowest indices)
    Configuration point(int n) const;
    InitialLaw law(int n) const;
    double initial_density(int n) const;
    nlohmann::ordered_json to_json() const;
};

/// Parsed and validated experiment description.
struct ExperimentConfig {
    std::string experiment;

    std::string kernel_type; // complete | cycle | random_regular | petersen | edge_file
    int n = 0;
    int k = 0;
    std::uint64_t kernel_seed = 0;
    std::string edge_file;

    PayoffMatrix payoff = PayoffMatrix::zero();
    bool payoff_is_donation = false;
    double b = 0.0, c = 0.0;

    std::optional<double> w;      // direct selection strength
    std::optional<double> w_inf;  // rescaled strength; w = w_inf * nu_total
    double mu1 = 0.0, mu0 = 0.0;

    std::size_t replicas = 10000;
    double horizon = std::numeric_limits<double>::infinity();
    std::optional<double> dt;
    std::uint64_t root_seed = 1;
    std::vector<double> sampling_grid;

    InitialSpec initial;
    std::vector<double> t_values{0.5, 2.0};
    std::vector<int> sites{0, 1};
    std::vector<int> m_values;
    std::vector<int> sizes{30, 60, 120};
    int max_ell = 2;
    int threads = 0;
    int trajectories = 0;

    VotingKernel build_kernel() const;
    VotingKernel build_kernel_sized(int size) const;
    // selection strength for a concrete kernel (validates the bound)
    double resolve_w(const VotingKernel& kernel) const;
    nlohmann::ordered_json resolved_json() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct ExperimentResult {
    std::string summary_line;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    nlohmann::ordered_json summary;
};

// Runs the named experiment; writes results.csv, summary.json and any
// per-replica trajectory CSVs into out_dir (created if missing).
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

} // namespace wfgame
