#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "proxreg/experiment.hpp"
#include "proxreg/ippm.hpp"

using namespace proxreg;
namespace fs = std::filesystem;

namespace {

const fs::path kCli = PROXREG_CLI_PATH;
const fs::path kExperiments = PROXREG_EXPERIMENTS_DIR;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("proxreg_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args) {
    const std::string cmd = kCli.string() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const std::string& text, Command cmd) {
    const fs::path path = write_file(scratch("cfg") / "c.json", text);
    try {
        load_config(path, cmd);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("command names") {
    CHECK(parse_command("run-ippm") == Command::run_ippm);
    CHECK(to_string(Command::gen_data) == "gen-data");
    CHECK_THROWS_AS(parse_command("run_ppm"), ConfigError);
}

TEST_CASE("config errors name the offending field") {
    const std::string base = R"("problem": {"benchmark": "quad1d"}, "schedule": {"c": 1})";
    CHECK(config_error("{" + base + "}", Command::run_ppm).empty());

    CHECK(config_error("{" + base + R"(, "stepsize": 1})", Command::run_ppm).find("stepsize") !=
          std::string::npos);
    CHECK(config_error(R"({"problem": {"benchmark": "quad1d", "L": 2}, "schedule": {"c": 1}})",
                       Command::run_ppm)
              .find("problem.L") != std::string::npos);
    CHECK(config_error("{" + base + R"(, "solver": "gd"})", Command::run_ppm).find("solver") !=
          std::string::npos);
    CHECK(config_error(R"({"problem": {"benchmark": "quad1d"}})", Command::run_ppm).find("schedule") !=
          std::string::npos);
    CHECK(config_error("{" + base + R"(, "criterion": {"kind": "A'"}})", Command::run_ppm)
              .find("criterion") != std::string::npos);
    CHECK(config_error(R"({"problem": {"benchmark": "quad1d"}, "schedule": {"c": 1}})", Command::run_ippm)
              .find("criterion") != std::string::npos);
    CHECK(config_error(R"({"problem": {"ml": "svm", "data": {"source": "generate"}}})", Command::estimate)
              .find("problem.data.source") != std::string::npos);
    CHECK(config_error(R"({"problem": {"benchmark": "quad1d"}, "nu": -1})", Command::estimate)
              .find("nu") != std::string::npos);

    const std::string syntax = config_error("{\n  \"problem\": {\n    \"benchmark\": \"quad1d\",\n  }\n}\n",
                                            Command::estimate);
    CHECK(syntax.find(":4:") != std::string::npos);
}

TEST_CASE("every shipped config parses") {
    int seen = 0;
    for (const auto& entry : fs::directory_iterator(kExperiments)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        const std::string name = entry.path().stem().string();
        Command cmd = Command::run_ppm;
        if (name.find("ippm") != std::string::npos) cmd = Command::run_ippm;
        else if (name.find("gd") != std::string::npos && name.find("gen") == std::string::npos) cmd = Command::run_gd;
        else if (name.find("estimate") != std::string::npos) cmd = Command::estimate;
        else if (name.find("audit") != std::string::npos) cmd = Command::audit;
        else if (name.find("gen_data") != std::string::npos) cmd = Command::gen_data;
        CHECK_NOTHROW(load_config(entry.path(), cmd));
        ++seen;
    }
    CHECK(seen >= 10);
}

TEST_CASE("cli runs write their outputs") {
    const fs::path out = scratch("runs");
    CHECK(cli("run-ppm --config " + (kExperiments / "wc_piecewise_ppm.json").string() + " --out " +
              (out / "ppm").string()) == 0);
    CHECK(fs::exists(out / "ppm" / "trace.csv"));
    CHECK(fs::exists(out / "ppm" / "summary.json"));

    CHECK(cli("audit --config " + (kExperiments / "quad1d_audit.json").string() + " --out " +
              (out / "audit").string()) == 0);
    const auto report = nlohmann::json::parse(read_file(out / "audit" / "report.json"));
    CHECK(report.contains("audit"));

    CHECK(cli("gen-data --config " + (kExperiments / "lasso_gen_data.json").string() + " --out " +
              (out / "gen").string()) == 0);
    CHECK(fs::exists(out / "gen" / "A.csv"));
    CHECK(fs::exists(out / "gen" / "x_hat.csv"));
}

TEST_CASE("cli output is deterministic and honours --seed") {
    const fs::path out = scratch("det");
    const std::string cfg = (kExperiments / "lasso_gen_data.json").string();
    REQUIRE(cli("gen-data --config " + cfg + " --out " + (out / "a").string()) == 0);
    REQUIRE(cli("gen-data --config " + cfg + " --out " + (out / "b").string()) == 0);
    REQUIRE(cli("gen-data --config " + cfg + " --seed 2 --out " + (out / "c").string()) == 0);
    CHECK(read_file(out / "a" / "A.csv") == read_file(out / "b" / "A.csv"));
    CHECK(read_file(out / "a" / "A.csv") != read_file(out / "c" / "A.csv"));

    const std::string two = "--config " + (kExperiments / "lasso_n10_m40_s5.json").string() + " --config " +
                            (kExperiments / "elastic_net_n10_m40_s5.json").string();
    REQUIRE(cli("run-ppm " + two + " --jobs 1 --out " + (out / "serial").string()) == 0);
    REQUIRE(cli("run-ppm " + two + " --jobs 2 --out " + (out / "parallel").string()) == 0);
    for (const char* stem : {"lasso_n10_m40_s5", "elastic_net_n10_m40_s5"}) {
        CAPTURE(stem);
        for (const char* file : {"trace.csv", "summary.json"}) {
            const std::string a = read_file(out / "serial" / stem / file);
            CHECK_FALSE(a.empty());
            CHECK(a == read_file(out / "parallel" / stem / file));
        }
    }
}

TEST_CASE("cli exit codes") {
    const fs::path out = scratch("codes");
    const fs::path bad = write_file(out / "bad.json", R"({"problem": {"benchmark": "nope"}})");
    CHECK(cli("estimate --config " + bad.string() + " --out " + (out / "x").string()) == 1);
    CHECK(cli("estimate --config " + (out / "missing.json").string() + " --out " + (out / "x").string()) != 0);

    const fs::path overstated = write_file(out / "gd.json", R"({
  "problem": {"benchmark": "aniso_quad"},
  "gd": {"L": 9, "mu": 1, "beta": 5},
  "x0": [1, 1],
  "max_iter": 30,
  "test_mode": true
})");
    CHECK(cli("run-gd --config " + overstated.string() + " --out " + (out / "gd").string()) == 2);
    const auto summary = nlohmann::json::parse(read_file(out / "gd" / "summary.json"));
    CHECK(summary["checks"]["cost"]["passed"] == false);
}

TEST_CASE("in-process run matches the requested solver") {
    const ExperimentConfig cfg = load_config(kExperiments / "quad1d_ippm_aprime.json", Command::run_ippm);
    REQUIRE(cfg.criterion);
    CHECK(cfg.criterion->kind == CriterionKind::Aprime);
    const fs::path out = scratch("inproc");
    const RunResult r = run_experiment(cfg, Command::run_ippm, out);
    CHECK(r.exit_code == 0);
    CHECK(r.summary["trace"]["solver"] == "ippm-Aprime");
    CHECK(r.summary["checks"]["ippm_sublinear"]["passed"] == true);
}
