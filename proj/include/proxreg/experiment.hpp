#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxreg/gd.hpp"
#include "proxreg/ippm.hpp"
#include "proxreg/ppm.hpp"
#include "proxreg/regularity.hpp"
#include "proxreg/zoo.hpp"

namespace proxreg {

enum class Command { run_ppm, run_ippm, run_gd, estimate, audit, gen_data };

std::string to_string(Command c);
/// Accepts the CLI subcommand names (run-ppm, ..., gen-data).
Command parse_command(const std::string& s);

struct DataConfig {
    std::string source;  ///< "generate", "synthetic_svm" or "libsvm"
    std::size_t n = 20;  ///< samples
    std::size_t m = 50;  ///< lasso features
    std::size_t s = 10;  ///< lasso: zeros in x̂
    std::size_t d = 5;   ///< synthetic svm features
    double separation = 1.5;
    std::filesystem::path path;  ///< libsvm file, relative paths resolved against the config
    std::optional<std::size_t> dimension;
};

struct ProblemConfig {
    std::optional<BenchmarkId> benchmark;
    double aniso_L = 9.0;
    std::optional<MLProblemParams> ml;
    DataConfig data;
    std::size_t reference_effort = 3000;
    double reference_step = 1.0;
};

struct ScheduleConfig {
    StepSchedule::Kind kind = StepSchedule::Kind::constant;
    double c = 1.0;
    std::vector<double> values;
    double growth = 1.0;

    StepSchedule build() const;
};

struct GdConfig {
    std::optional<double> L;
    std::optional<double> mu;
    std::optional<double> beta;
    std::optional<double> step;
};

struct ExperimentConfig {
    std::string solver;  ///< "ppm", "ippm", "gd" or empty
    ProblemConfig problem;
    ScheduleConfig schedule;
    std::optional<InexactCriterion> criterion;
    std::optional<GdConfig> gd;
    std::optional<std::vector<double>> x0;
    std::uint64_t seed = 0;
    std::size_t max_iter = 500;
    std::optional<double> nu;
    std::string output;  ///< subdirectory of --out, may be empty
    bool test_mode = false;
    bool estimate = false;
    bool audit = false;
    std::optional<EstimationPlan> plan;
};

/// Validates a parsed config for a subcommand. Errors are ConfigError naming the
/// offending field.
ExperimentConfig parse_config(const nlohmann::json& j, Command cmd,
                              const std::filesystem::path& base_dir = ".");
/// Reads and parses a JSON file; syntax errors report the line number.
ExperimentConfig load_config(const std::filesystem::path& path, Command cmd);

/// Problem with f* (and S where available) installed; ML problems get a reference solve.
ProblemSpec build_problem(const ProblemConfig& pc, std::uint64_t seed);

/// Consecutive-ratio statistics of the cost gap, over steps with gap_k > floor.
struct ContractionStats {
    std::size_t steps = 0;
    bool strictly_decreasing = true;
    std::size_t longest_run_below = 0;  ///< longest run of ratios < threshold
    double max_ratio = 0.0;
    double geometric_mean_ratio = 0.0;
};

ContractionStats contraction_stats(const IterationTrace& trace, double threshold = 0.999,
                                   double floor = 1e-14);

struct RunResult {
    int exit_code = 0;  ///< 0 ok, 2 bound violation in test mode
    nlohmann::json summary;
    std::vector<std::filesystem::path> artifacts;
};

/// Runs one experiment and writes trace.csv, report.json (with the audit) and
/// summary.json, as applicable, below out_dir / config.output.
RunResult run_experiment(const ExperimentConfig& cfg, Command cmd,
                         const std::filesystem::path& out_dir);

}  // namespace proxreg
