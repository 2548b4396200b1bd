#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfgame/experiments.hpp"
#include "wfgame/io.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, std::optional<long long> replicas,
                std::optional<int> threads) {
    wfgame::ExperimentConfig config;
    try {
        config = wfgame::load_config(config_path);
        if (seed) config.root_seed = *seed;
        if (replicas) {
            if (*replicas <= 0) throw wfgame::InvalidInput("--replicas must be positive");
            config.replicas = static_cast<std::size_t>(*replicas);
        }
        if (threads) config.threads = *threads;
    } catch (const wfgame::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    try {
        wfgame::ExperimentResult result = wfgame::run_experiment(config, out_dir);
        std::cout << result.summary_line << '\n';
        return 0;
    } catch (const wfgame::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
}

int export_kernel_command(const std::string& type, int n, int k, std::uint64_t seed,
                          const std::string& edge_file, const std::string& out_path) {
    try {
        nlohmann::json j = {{"experiment", "identity"},
                            {"kernel", {{"type", type}}}};
        if (n > 0) j["kernel"]["n"] = n;
        if (k > 0) j["kernel"]["k"] = k;
        j["kernel"]["seed"] = seed;
        if (!edge_file.empty()) j["kernel"]["edge_file"] = edge_file;
        wfgame::ExperimentConfig config = wfgame::parse_config(j);
        wfgame::VotingKernel kernel = config.build_kernel();
        wfgame::write_kernel_csv(out_path, kernel);
        std::cout << "wrote " << kernel.size() << "x" << kernel.size() << " kernel to "
                  << out_path << '\n';
        return 0;
    } catch (const wfgame::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"voter models, evolutionary games and their diffusion limits"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<long long> replicas;
    std::optional<int> threads;
    CLI::App* run = app.add_subcommand("run", "run an experiment described by a JSON config");
    run->add_option("config", config_path, "path to the experiment config")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_option("--seed", seed, "override the root seed");
    run->add_option("--replicas", replicas, "override the replica count");
    run->add_option("--threads", threads, "worker threads (default: all cores)");

    std::string kernel_type = "complete", edge_file, kernel_out = "kernel.csv";
    int n = 0, k = 0;
    std::uint64_t kernel_seed = 1;
    CLI::App* exportk = app.add_subcommand("export-kernel", "write a kernel matrix as CSV");
    exportk->add_option("--type", kernel_type, "complete|cycle|random_regular|petersen|edge_file");
    exportk->add_option("--n", n, "site count");
    exportk->add_option("--k", k, "degree (random_regular)");
    exportk->add_option("--seed", kernel_seed, "generation seed (random_regular)");
    exportk->add_option("--edge-file", edge_file, "edge list path (edge_file)");
    exportk->add_option("--out", kernel_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(config_path, out_dir, seed, replicas, threads);
    if (exportk->parsed()) {
        return export_kernel_command(kernel_type, n, k, kernel_seed, edge_file, kernel_out);
    }
    return 2;
}
