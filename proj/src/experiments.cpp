#include "wfgame/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "wfgame/diffusion.hpp"
#include "wfgame/ensemble.hpp"
#include "wfgame/io.hpp"
#include "wfgame/simulate.hpp"
#include "wfgame/stats.hpp"

namespace wfgame {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// initial configurations

Configuration InitialSpec::sample(int n, Rng& rng) const {
    switch (kind) {
        case Kind::UniformOnes: {
            int count = resolved_m(n);
            if (count > n) throw InvalidInput("initial: more ones than sites");
            // partial Fisher-Yates for a uniform m-subset
            std::vector<int> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            Configuration config(n);
            for (int i = 0; i < count; ++i) {
                std::size_t j = i + rng.uniform_int(static_cast<std::uint64_t>(n - i));
                std::swap(idx[i], idx[j]);
                config.set(idx[i], 1);
            }
            return config;
        }
        case Kind::FixedOnes:
            return Configuration::with_ones(n, ones);
        case Kind::BernoulliDensity: {
            Configuration config(n);
            for (int x = 0; x < n; ++x) {
                if (rng.uniform() < density) config.set(x, 1);
            }
            return config;
        }
    }
    throw InvalidInput("initial: unknown kind");
}

Configuration InitialSpec::point(int n) const {
    switch (kind) {
        case Kind::UniformOnes: {
            int count = resolved_m(n);
            if (count > n) throw InvalidInput("initial: more ones than sites");
            Configuration config(n);
            for (int x = 0; x < count; ++x) config.set(x, 1);
            return config;
        }
        case Kind::FixedOnes:
            return Configuration::with_ones(n, ones);
        case Kind::BernoulliDensity: {
            int count = static_cast<int>(std::lround(density * n));
            Configuration config(n);
            for (int x = 0; x < count; ++x) config.set(x, 1);
            return config;
        }
    }
    throw InvalidInput("initial: unknown kind");
}

InitialLaw InitialSpec::law(int n) const {
    switch (kind) {
        case Kind::UniformOnes:
            return InitialLaw::uniform_ones(resolved_m(n));
        case Kind::FixedOnes:
            return InitialLaw::point(Configuration::with_ones(n, ones));
        case Kind::BernoulliDensity:
            return InitialLaw::product(density);
    }
    throw InvalidInput("initial: unknown kind");
}

double InitialSpec::initial_density(int n) const {
    switch (kind) {
        case Kind::UniformOnes:
            return static_cast<double>(resolved_m(n)) / n;
        case Kind::FixedOnes:
            return static_cast<double>(ones.size()) / n;
        case Kind::BernoulliDensity:
            return density;
    }
    return 0.0;
}

ordered_json InitialSpec::to_json() const {
    ordered_json j;
    switch (kind) {
        case Kind::UniformOnes:
            j["m"] = m;
            break;
        case Kind::FixedOnes:
            j["ones"] = ones;
            break;
        case Kind::BernoulliDensity:
            j["density"] = density;
            break;
    }
    return j;
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

[[noreturn]] void schema_error(const std::string& message) {
    throw InvalidInput("config: " + message);
}

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            schema_error("unknown key '" + it.key() + "' in " + where);
        }
    }
}

} // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) schema_error("top level must be a JSON object");
    require_keys(j, {"experiment", "kernel", "payoff", "selection", "mutation", "replicas",
                     "horizon", "dt", "root_seed", "sampling_grid", "initial", "t_values",
                     "sites", "m_values", "sizes", "max_ell", "threads", "trajectories"},
                 "the top level");

    ExperimentConfig cfg;
    if (!j.contains("experiment") || !j["experiment"].is_string()) {
        schema_error("missing required string field 'experiment'");
    }
    cfg.experiment = j["experiment"].get<std::string>();

    if (!j.contains("kernel") || !j["kernel"].is_object()) {
        schema_error("missing required object field 'kernel'");
    }
    const json& kj = j["kernel"];
    require_keys(kj, {"type", "n", "k", "seed", "edge_file"}, "'kernel'");
    if (!kj.contains("type")) schema_error("kernel: missing 'type'");
    cfg.kernel_type = kj["type"].get<std::string>();
    if (kj.contains("n")) cfg.n = kj["n"].get<int>();
    if (kj.contains("k")) cfg.k = kj["k"].get<int>();
    if (kj.contains("seed")) cfg.kernel_seed = kj["seed"].get<std::uint64_t>();
    if (kj.contains("edge_file")) cfg.edge_file = kj["edge_file"].get<std::string>();
    if (cfg.kernel_type == "edge_file" && cfg.edge_file.empty()) {
        schema_error("kernel: type 'edge_file' requires 'edge_file'");
    }
    if (cfg.kernel_type == "petersen") cfg.n = 10;

    if (j.contains("payoff")) {
        const json& pj = j["payoff"];
        require_keys(pj, {"b", "c", "matrix"}, "'payoff'");
        if (pj.contains("matrix")) {
            auto m = pj["matrix"].get<std::vector<std::vector<double>>>();
            if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2) {
                schema_error("payoff: 'matrix' must be 2x2, rows ordered [1, 0]");
            }
            cfg.payoff = PayoffMatrix(m[0][0], m[0][1], m[1][0], m[1][1]);
        } else if (pj.contains("b") || pj.contains("c")) {
            cfg.b = pj.value("b", 0.0);
            cfg.c = pj.value("c", 0.0);
            cfg.payoff = PayoffMatrix::donation(cfg.b, cfg.c);
            cfg.payoff_is_donation = true;
        } else {
            schema_error("payoff: give either {b, c} or {matrix}");
        }
    }

    if (j.contains("selection")) {
        const json& sj = j["selection"];
        require_keys(sj, {"w", "w_inf"}, "'selection'");
        if (sj.contains("w") && sj.contains("w_inf")) {
            schema_error("selection: give exactly one of 'w' and 'w_inf'");
        }
        if (sj.contains("w")) cfg.w = sj["w"].get<double>();
        if (sj.contains("w_inf")) cfg.w_inf = sj["w_inf"].get<double>();
    }

    if (j.contains("mutation")) {
        const json& mj = j["mutation"];
        require_keys(mj, {"mu1", "mu0"}, "'mutation'");
        cfg.mu1 = mj.value("mu1", 0.0);
        cfg.mu0 = mj.value("mu0", 0.0);
        if (cfg.mu1 < 0.0 || cfg.mu0 < 0.0) schema_error("mutation: rates must be nonnegative");
    }

    if (j.contains("replicas")) {
        long long r = j["replicas"].get<long long>();
        if (r <= 0) schema_error("'replicas' must be positive");
        cfg.replicas = static_cast<std::size_t>(r);
    }
    if (j.contains("horizon")) {
        cfg.horizon = j["horizon"].get<double>();
        if (!(cfg.horizon > 0.0)) schema_error("'horizon' must be positive");
    }
    if (j.contains("dt")) {
        cfg.dt = j["dt"].get<double>();
        if (!(*cfg.dt > 0.0)) schema_error("'dt' must be positive");
    }
    if (j.contains("root_seed")) cfg.root_seed = j["root_seed"].get<std::uint64_t>();
    if (j.contains("sampling_grid")) {
        cfg.sampling_grid = j["sampling_grid"].get<std::vector<double>>();
        for (std::size_t i = 0; i < cfg.sampling_grid.size(); ++i) {
            if (cfg.sampling_grid[i] <= 0.0 ||
                (i > 0 && cfg.sampling_grid[i] <= cfg.sampling_grid[i - 1])) {
                schema_error("'sampling_grid' must be positive and increasing");
            }
        }
    }

    if (j.contains("initial")) {
        const json& ij = j["initial"];
        require_keys(ij, {"m", "ones", "density"}, "'initial'");
        if (ij.contains("m")) {
            cfg.initial.kind = InitialSpec::Kind::UniformOnes;
            cfg.initial.m = ij["m"].get<int>();
            if (cfg.initial.m < 0) schema_error("initial: 'm' must be nonnegative");
        } else if (ij.contains("ones")) {
            cfg.initial.kind = InitialSpec::Kind::FixedOnes;
            cfg.initial.ones = ij["ones"].get<std::vector<int>>();
        } else if (ij.contains("density")) {
            cfg.initial.kind = InitialSpec::Kind::BernoulliDensity;
            cfg.initial.density = ij["density"].get<double>();
            if (cfg.initial.density < 0.0 || cfg.initial.density > 1.0) {
                schema_error("initial: 'density' must lie in [0,1]");
            }
        } else {
            schema_error("initial: give one of {m, ones, density}");
        }
    }

    if (j.contains("t_values")) cfg.t_values = j["t_values"].get<std::vector<double>>();
    if (j.contains("sites")) cfg.sites = j["sites"].get<std::vector<int>>();
    if (j.contains("m_values")) cfg.m_values = j["m_values"].get<std::vector<int>>();
    if (j.contains("sizes")) {
        cfg.sizes = j["sizes"].get<std::vector<int>>();
        if (cfg.sizes.empty()) schema_error("'sizes' must be nonempty");
    }
    if (j.contains("max_ell")) {
        cfg.max_ell = j["max_ell"].get<int>();
        if (cfg.max_ell < 1) schema_error("'max_ell' must be >= 1");
    }
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("trajectories")) {
        cfg.trajectories = j["trajectories"].get<int>();
        if (cfg.trajectories < 0) schema_error("'trajectories' must be >= 0");
    }

    static const std::vector<std::string> known = {
        "identity", "gamma", "first-order", "duality", "fixation-compare",
        "kingman", "absorption-wasserstein"};
    if (std::find(known.begin(), known.end(), cfg.experiment) == known.end()) {
        schema_error("unknown experiment '" + cfg.experiment + "'");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

VotingKernel ExperimentConfig::build_kernel_sized(int size) const {
    if (kernel_type == "complete") return VotingKernel::complete(size);
    if (kernel_type == "cycle") return VotingKernel::cycle(size);
    if (kernel_type == "random_regular") return VotingKernel::random_regular(size, k, kernel_seed);
    if (kernel_type == "petersen") return VotingKernel::petersen();
    if (kernel_type == "edge_file") {
        if (size <= 0) schema_error("kernel: 'n' is required with an edge file");
        return VotingKernel::from_weighted_graph(size, load_edge_list(edge_file));
    }
    schema_error("kernel: unknown type '" + kernel_type + "'");
}

VotingKernel ExperimentConfig::build_kernel() const {
    if (n <= 0 && kernel_type != "petersen") schema_error("kernel: missing positive 'n'");
    return build_kernel_sized(n);
}

double ExperimentConfig::resolve_w(const VotingKernel& kernel) const {
    double value = 0.0;
    if (w && w_inf) schema_error("selection: give exactly one of 'w' and 'w_inf'");
    if (w) value = *w;
    if (w_inf) value = *w_inf * kernel.nu_total();
    if (value < 0.0 || value > max_selection(payoff)) {
        throw InvalidInput("selection strength w=" + std::to_string(value) +
                           " violates the bound w <= 1/(2 + 2 max|payoff|) = " +
                           std::to_string(max_selection(payoff)));
    }
    return value;
}

ordered_json ExperimentConfig::resolved_json() const {
    ordered_json j;
    j["experiment"] = experiment;
    ordered_json kj;
    kj["type"] = kernel_type;
    kj["n"] = n;
    if (kernel_type == "random_regular") {
        kj["k"] = k;
        kj["seed"] = kernel_seed;
    }
    if (!edge_file.empty()) kj["edge_file"] = edge_file;
    j["kernel"] = kj;
    if (payoff_is_donation) {
        j["payoff"] = ordered_json{{"b", b}, {"c", c}};
    } else {
        j["payoff"] = ordered_json{{"matrix", {{payoff(1, 1), payoff(1, 0)},
                                               {payoff(0, 1), payoff(0, 0)}}}};
    }
    ordered_json sj;
    if (w) sj["w"] = *w;
    if (w_inf) sj["w_inf"] = *w_inf;
    j["selection"] = sj;
    j["mutation"] = ordered_json{{"mu1", mu1}, {"mu0", mu0}};
    j["replicas"] = replicas;
    if (std::isfinite(horizon)) j["horizon"] = horizon;
    if (dt) j["dt"] = *dt;
    j["root_seed"] = root_seed;
    if (!sampling_grid.empty()) j["sampling_grid"] = sampling_grid;
    j["initial"] = initial.to_json();
    j["threads"] = threads;
    return j;
}

// ---------------------------------------------------------------------------
// experiment pipelines

namespace {

std::string fmt(double v) { return format_double(v); }

struct ResultBuilder {
    ExperimentResult result;
    void header(std::vector<std::string> cols) { result.columns = std::move(cols); }
    void row(std::vector<std::string> cells) { result.rows.push_back(std::move(cells)); }
};

ExperimentResult run_identity(const ExperimentConfig& cfg) {
    VotingKernel kernel = cfg.build_kernel();
    MeetingTable table = meeting_times_exact(kernel);
    IdentityCheck check = meeting_identity_check(kernel, table);
    ResultBuilder rb;
    rb.header({"n", "lhs", "rhs", "residual", "solver_residual"});
    rb.row({std::to_string(kernel.size()), fmt(check.lhs), fmt(check.rhs), fmt(check.residual),
            fmt(table.max_residual)});
    std::ostringstream line;
    line << "identity: n=" << kernel.size() << " lhs=" << check.lhs << " rhs=" << check.rhs
         << " residual=" << check.residual;
    rb.result.summary_line = line.str();
    rb.result.summary["lhs"] = check.lhs;
    rb.result.summary["rhs"] = check.rhs;
    rb.result.summary["residual"] = check.residual;
    return rb.result;
}

ExperimentResult run_gamma(const ExperimentConfig& cfg) {
    VotingKernel kernel = cfg.build_kernel();
    MeetingTable table = meeting_times_exact(kernel);
    double gamma = gamma_timescale(kernel, table);
    double over_n = gamma / kernel.size();
    int degree = kernel.regular_degree();
    ResultBuilder rb;
    rb.header({"n", "gamma", "gamma_over_n", "pair_approx_scale", "ratio"});
    double scale = std::numeric_limits<double>::quiet_NaN();
    double ratio = scale;
    if (degree >= 3) {
        // exploratory comparison against (k-1)/(2(k-2))
        scale = (degree - 1.0) / (2.0 * (degree - 2.0));
        ratio = over_n / scale;
    }
    rb.row({std::to_string(kernel.size()), fmt(gamma), fmt(over_n),
            degree >= 3 ? fmt(scale) : "", degree >= 3 ? fmt(ratio) : ""});
    std::ostringstream line;
    line << "gamma: n=" << kernel.size() << " gamma=" << gamma << " gamma/n=" << over_n;
    if (degree >= 3) line << " vs (k-1)/(2(k-2))=" << scale;
    rb.result.summary_line = line.str();
    rb.result.summary["gamma"] = gamma;
    rb.result.summary["gamma_over_n"] = over_n;
    return rb.result;
}

ExperimentResult run_first_order(const ExperimentConfig& cfg) {
    VotingKernel kernel = cfg.build_kernel();
    const int n = kernel.size();
    std::vector<int> ms = cfg.m_values;
    if (ms.empty()) ms.push_back(n / 2);
    const int degree = kernel.regular_degree();
    ResultBuilder rb;
    rb.header({"m", "coefficient", "closed_form", "abs_error"});
    double max_err = 0.0;
    bool have_closed = degree >= 3 && cfg.payoff_is_donation;
    for (int m : ms) {
        if (m < 0 || m > n) schema_error("first-order: m outside [0, n]");
        double coeff = first_order_coefficient(kernel, cfg.payoff, InitialLaw::uniform_ones(m));
        std::string closed, err;
        if (have_closed) {
            double cf = first_order_regular_closed_form(n, degree, cfg.b, cfg.c, m);
            closed = fmt(cf);
            err = fmt(std::abs(coeff - cf));
            max_err = std::max(max_err, std::abs(coeff - cf));
        }
        rb.row({std::to_string(m), fmt(coeff), closed, err});
    }
    std::ostringstream line;
    line << "first-order: n=" << n << " computed " << ms.size() << " coefficient(s)";
    if (have_closed) line << ", max |error| vs closed form = " << max_err;
    rb.result.summary_line = line.str();
    if (have_closed) rb.result.summary["max_abs_error"] = max_err;
    return rb.result;
}

ExperimentResult run_duality(const ExperimentConfig& cfg) {
    VotingKernel kernel = cfg.build_kernel();
    const int n = kernel.size();
    if (cfg.sites.empty()) schema_error("duality: 'sites' must be nonempty");
    for (int s : cfg.sites) {
        if (s < 0 || s >= n) schema_error("duality: site out of range");
    }
    Configuration initial = cfg.initial.point(n);
    ResultBuilder rb;
    rb.header({"check", "t", "voter_estimate", "voter_se", "dual_estimate", "dual_se", "z"});
    double max_abs_z = 0.0;
    std::uint64_t stream = 0;
    auto add = [&](const std::string& name, double t, const DualityCheck& chk) {
        rb.row({name, fmt(t), fmt(chk.voter_estimate), fmt(chk.voter_se), fmt(chk.dual_estimate),
                fmt(chk.dual_se), fmt(chk.z_score)});
        max_abs_z = std::max(max_abs_z, std::abs(chk.z_score));
    };
    for (double t : cfg.t_values) {
        std::vector<int> one{cfg.sites[0]};
        add("moment_1pt", t,
            duality_check_moment(kernel, initial, one, t, cfg.replicas,
                                 derive_seed(cfg.root_seed, stream++), cfg.threads));
        if (cfg.sites.size() >= 2) {
            std::vector<int> two{cfg.sites[0], cfg.sites[1]};
            add("moment_2pt", t,
                duality_check_moment(kernel, initial, two, t, cfg.replicas,
                                     derive_seed(cfg.root_seed, stream++), cfg.threads));
        }
        if (cfg.mu1 + cfg.mu0 > 0.0 && cfg.sites.size() >= 2) {
            add("feynman_kac", t,
                duality_check_fk(kernel, cfg.mu1, cfg.mu0, initial, cfg.sites[0], cfg.sites[1], t,
                                 cfg.replicas, derive_seed(cfg.root_seed, stream++), cfg.threads));
        }
    }
    std::ostringstream line;
    line << "duality: n=" << n << " max |z| = " << max_abs_z << " over " << rb.result.rows.size()
         << " checks";
    rb.result.summary_line = line.str();
    rb.result.summary["max_abs_z"] = max_abs_z;
    return rb.result;
}

ExperimentResult run_fixation_compare(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (!cfg.payoff_is_donation) {
        schema_error("fixation-compare: needs a donation payoff {b, c}");
    }
    VotingKernel kernel = cfg.build_kernel();
    const int n = kernel.size();
    const double w = cfg.resolve_w(kernel);
    const double w_infinity = cfg.w_inf ? *cfg.w_inf : w / kernel.nu_total();

    GameParams game{cfg.payoff, w, 0.0, 0.0};
    GameParams neutral{cfg.payoff, w, 0.0, 0.0}; // weighted runs use neutral moves

    SamplingSchedule schedule;
    schedule.times = cfg.sampling_grid;

    // direct game fixation
    std::vector<double> fixed(cfg.replicas);
    {
        auto recs = run_ensemble(cfg.replicas, derive_seed(cfg.root_seed, 0),
                                 [&](std::size_t i, Rng& rng) {
            Configuration start = cfg.initial.sample(n, rng);
            const bool traced = static_cast<long long>(i) < cfg.trajectories;
            TrajectoryRecord rec = simulate_game(kernel, game, start,
                                                 StopRule::absorption(cfg.horizon),
                                                 traced ? schedule : SamplingSchedule::none(),
                                                 rng.raw());
            if (traced) {
                ordered_json meta = cfg.resolved_json();
                meta["replica"] = i;
                write_trajectory_csv(out_dir + "/trajectory_" + std::to_string(i) + ".csv",
                                     rec, meta.dump());
            }
            return rec.absorption && rec.absorption->boundary == 1 ? 1.0 : 0.0;
        }, cfg.threads);
        fixed = std::move(recs);
    }
    EnsembleSummary direct = summarize(fixed);

    // importance-weighted neutral runs
    struct WeightedOutcome { double fixed_flag; double weight; };
    auto weighted_runs = run_ensemble(cfg.replicas, derive_seed(cfg.root_seed, 1),
                                      [&](std::size_t, Rng& rng) {
        Configuration start = cfg.initial.sample(n, rng);
        TrajectoryRecord rec = simulate_voter_weighted(kernel, neutral, start,
                                                       StopRule::absorption(cfg.horizon),
                                                       SamplingSchedule::none(), rng.raw());
        WeightedOutcome o;
        o.fixed_flag = rec.absorption && rec.absorption->boundary == 1 ? 1.0 : 0.0;
        o.weight = std::exp(rec.final_log_weight);
        return o;
    }, cfg.threads);
    std::vector<double> values(cfg.replicas), weights(cfg.replicas);
    for (std::size_t i = 0; i < cfg.replicas; ++i) {
        values[i] = weighted_runs[i].fixed_flag;
        weights[i] = weighted_runs[i].weight;
    }
    EnsembleSummary weighted = summarize(values, weights);

    // limiting prediction from the kernel's return probabilities
    KernelAnalysis analysis = analyze(kernel, 3);
    auto [k1, k2] = k_constants({1.0, 0.0, analysis.r_modal[2], analysis.r_modal[3]}, cfg.b, cfg.c);
    double a = w_infinity * k1;
    double y0 = cfg.initial.initial_density(n);
    double predicted = fixation_probability(a, y0);

    ResultBuilder rb;
    rb.header({"method", "estimate", "std_error", "ci_low", "ci_high", "ess", "z_vs_prediction"});
    auto zrow = [&](const std::string& name, const EnsembleSummary& s) {
        double z = s.std_error > 0.0 ? (s.mean - predicted) / s.std_error
                                     : (s.mean == predicted ? 0.0
                                                            : std::numeric_limits<double>::infinity());
        rb.row({name, fmt(s.mean), fmt(s.std_error), fmt(s.ci_low), fmt(s.ci_high), fmt(s.ess),
                fmt(z)});
    };
    zrow("game_direct", direct);
    zrow("voter_weighted", weighted);
    rb.row({"wf_prediction", fmt(predicted), "0.0", fmt(predicted), fmt(predicted), "", ""});

    double z_direct_weighted =
        (direct.mean - weighted.mean) /
        std::sqrt(direct.std_error * direct.std_error + weighted.std_error * weighted.std_error);

    std::ostringstream line;
    line << "fixation-compare: n=" << n << " w=" << w << " direct=" << direct.mean
         << " weighted=" << weighted.mean << " prediction=" << predicted
         << " (a=" << a << ", y0=" << y0 << ")";
    rb.result.summary_line = line.str();
    rb.result.summary["direct"] = direct.mean;
    rb.result.summary["direct_se"] = direct.std_error;
    rb.result.summary["weighted"] = weighted.mean;
    rb.result.summary["weighted_se"] = weighted.std_error;
    rb.result.summary["weighted_ess"] = weighted.ess;
    rb.result.summary["prediction"] = predicted;
    rb.result.summary["drift_a"] = a;
    rb.result.summary["z_direct_vs_weighted"] = z_direct_weighted;
    return rb.result;
}

ExperimentResult run_kingman(const ExperimentConfig& cfg, const std::string& out_dir) {
    VotingKernel kernel = cfg.build_kernel();
    CoalescentSpectrum spectrum = coalescent_spectrum(kernel, cfg.replicas, cfg.root_seed,
                                                  cfg.max_ell, cfg.threads);
    ResultBuilder rb;
    rb.header({"ell", "sample_mean", "std_error", "reference_mean", "z", "ks"});
    double max_abs_z = 0.0;
    for (int ell = 1; ell <= cfg.max_ell; ++ell) {
        double mean = spectrum.sample_mean[ell - 1];
        double se = spectrum.sample_se[ell - 1];
        double ref = spectrum.reference_mean[ell - 1];
        double z = se > 0.0 ? (mean - ref) / se : 0.0;
        max_abs_z = std::max(max_abs_z, std::abs(z));
        rb.row({std::to_string(ell), fmt(mean), fmt(se), fmt(ref), fmt(z),
                fmt(spectrum.ks_statistic[ell - 1])});
        ordered_json meta = cfg.resolved_json();
        meta["ell"] = ell;
        meta["gamma"] = spectrum.gamma;
        write_samples_csv(out_dir + "/coalescence_ell" + std::to_string(ell) + ".csv",
                          spectrum.samples[ell - 1], meta.dump(),
                          "c" + std::to_string(ell) + "_over_gamma");
    }
    std::ostringstream line;
    line << "kingman: n=" << kernel.size() << " gamma=" << spectrum.gamma << " max |z| = " << max_abs_z;
    rb.result.summary_line = line.str();
    rb.result.summary["gamma"] = spectrum.gamma;
    rb.result.summary["max_abs_z"] = max_abs_z;
    return rb.result;
}

ExperimentResult run_absorption_wasserstein(const ExperimentConfig& cfg) {
    if (cfg.kernel_type != "complete") {
        schema_error("absorption-wasserstein: ladder runs on complete kernels");
    }
    if (!cfg.payoff_is_donation) {
        schema_error("absorption-wasserstein: needs a donation payoff {b, c}");
    }
    if (!cfg.w_inf) {
        schema_error("absorption-wasserstein: give selection as {w_inf} so that w scales with n");
    }
    ResultBuilder rb;
    rb.header({"n", "gamma", "w", "w1_distance"});
    std::vector<double> distances;
    std::uint64_t stream = 0;
    for (int size : cfg.sizes) {
        VotingKernel kernel = cfg.build_kernel_sized(size);
        double gamma = gamma_timescale(kernel);
        double w = cfg.resolve_w(kernel);
        GameParams game{cfg.payoff, w, 0.0, 0.0};
        GameParams neutral;
        auto absorb_time = [&](const GameParams& params, std::size_t replica_stream) {
            return run_ensemble(cfg.replicas, derive_seed(cfg.root_seed, replica_stream),
                                [&](std::size_t, Rng& rng) {
                Configuration start = cfg.initial.sample(size, rng);
                TrajectoryRecord rec = simulate_game(kernel, params, start,
                                                     StopRule::absorption(cfg.horizon),
                                                     SamplingSchedule::none(), rng.raw());
                if (!rec.absorption) throw SimulationError("absorption-wasserstein: horizon hit "
                                                           "before absorption");
                return rec.absorption->time / gamma;
            }, cfg.threads);
        };
        std::vector<double> game_samples = absorb_time(game, stream++);
        std::vector<double> voter_samples = absorb_time(neutral, stream++);
        double dist = wasserstein1(game_samples, voter_samples);
        distances.push_back(dist);
        rb.row({std::to_string(size), fmt(gamma), fmt(w), fmt(dist)});
    }
    bool monotone = true;
    for (std::size_t i = 1; i < distances.size(); ++i) {
        if (distances[i] >= distances[i - 1]) monotone = false;
    }
    std::ostringstream line;
    line << "absorption-wasserstein: W1 over sizes {";
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (i) line << ", ";
        line << distances[i];
    }
    line << "} monotone_decrease=" << (monotone ? "yes" : "no");
    rb.result.summary_line = line.str();
    rb.result.summary["distances"] = distances;
    rb.result.summary["monotone_decrease"] = monotone;
    return rb.result;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    ExperimentResult result;
    if (cfg.experiment == "identity") {
        result = run_identity(cfg);
    } else if (cfg.experiment == "gamma") {
        result = run_gamma(cfg);
    } else if (cfg.experiment == "first-order") {
        result = run_first_order(cfg);
    } else if (cfg.experiment == "duality") {
        result = run_duality(cfg);
    } else if (cfg.experiment == "fixation-compare") {
        result = run_fixation_compare(cfg, out_dir);
    } else if (cfg.experiment == "kingman") {
        result = run_kingman(cfg, out_dir);
    } else if (cfg.experiment == "absorption-wasserstein") {
        result = run_absorption_wasserstein(cfg);
    } else {
        schema_error("unknown experiment '" + cfg.experiment + "'");
    }

    ordered_json resolved = cfg.resolved_json();
    {
        std::ofstream csv(out_dir + "/results.csv");
        if (!csv) throw SimulationError("cannot write " + out_dir + "/results.csv");
        csv << "# " << resolved.dump() << '\n';
        for (std::size_t i = 0; i < result.columns.size(); ++i) {
            if (i) csv << ',';
            csv << result.columns[i];
        }
        csv << '\n';
        for (const auto& row : result.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) csv << ',';
                csv << row[i];
            }
            csv << '\n';
        }
    }
    {
        ordered_json summary;
        summary["config"] = resolved;
        summary["summary_line"] = result.summary_line;
        summary["metrics"] = result.summary;
        std::ofstream js(out_dir + "/summary.json");
        if (!js) throw SimulationError("cannot write " + out_dir + "/summary.json");
        js << summary.dump(2) << '\n';
    }
    return result;
}

} // namespace wfgame
