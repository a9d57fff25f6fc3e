#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "proxreg/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::vector<std::string> configs;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
};

// 0 ok, 1 operational error, 2 bound violation
int run_one(proxreg::Command cmd, const std::string& config, const fs::path& out,
            const std::optional<std::uint64_t>& seed, std::mutex& log) {
    try {
        proxreg::ExperimentConfig cfg = proxreg::load_config(config, cmd);
        if (seed) cfg.seed = *seed;
        const auto result = proxreg::run_experiment(cfg, cmd, out);
        std::lock_guard<std::mutex> lock(log);
        for (const auto& a : result.artifacts) std::cout << "wrote " << a.string() << '\n';
        if (result.exit_code == 2) {
            std::cerr << config << ": bound check failed, see summary.json\n";
        }
        return result.exit_code;
    } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(log);
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int run_all(proxreg::Command cmd, const Options& o) {
    std::mutex log;
    const bool many = o.configs.size() > 1;
    std::vector<int> codes(o.configs.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < o.configs.size(); i = next++) {
            // several configs share --out, so each gets its own subdirectory
            const fs::path out = many ? fs::path(o.out) / fs::path(o.configs[i]).stem()
                                      : fs::path(o.out);
            codes[i] = run_one(cmd, o.configs[i], out, o.seed, log);
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(o.configs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (std::find(codes.begin(), codes.end(), 1) != codes.end()) return 1;
    if (std::find(codes.begin(), codes.end(), 2) != codes.end()) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proximal point experiments"};
    app.require_subcommand(1);

    Options opts;
    const std::pair<const char*, const char*> commands[] = {
        {"run-ppm", "exact proximal point method"},
        {"run-ippm", "inexact proximal point method"},
        {"run-gd", "gradient descent"},
        {"estimate", "estimate regularity constants"},
        {"audit", "estimate constants and check their implications"},
        {"gen-data", "write a generated dataset"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.configs, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out, "output directory")->required();
        sub->add_option("--seed", opts.seed, "override the config seed");
        sub->add_option("--jobs", opts.jobs, "configs to run in parallel")
            ->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    const CLI::App* chosen = app.get_subcommands().front();
    return run_all(proxreg::parse_command(chosen->get_name()), opts);
}
