#include "proxreg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace proxreg {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Command c) {
    switch (c) {
        case Command::run_ppm: return "run-ppm";
        case Command::run_ippm: return "run-ippm";
        case Command::run_gd: return "run-gd";
        case Command::estimate: return "estimate";
        case Command::audit: return "audit";
        case Command::gen_data: return "gen-data";
    }
    return "?";
}

Command parse_command(const std::string& s) {
    for (auto c : {Command::run_ppm, Command::run_ippm, Command::run_gd, Command::estimate,
                   Command::audit, Command::gen_data}) {
        if (to_string(c) == s) return c;
    }
    throw ConfigError("unknown command '" + s + "'");
}

namespace {

const char* solver_for(Command c) {
    switch (c) {
        case Command::run_ppm: return "ppm";
        case Command::run_ippm: return "ippm";
        case Command::run_gd: return "gd";
        default: return "";
    }
}

// Strict view of one JSON object: typed getters plus a check for unknown keys.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError("'" + where_ + "': expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        if (!has(key)) throw ConfigError(path(key) + ": required field is missing");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    std::optional<double> maybe_number(const std::string& key) {
        return has(key) ? std::optional<double>(number(key)) : std::nullopt;
    }

    std::size_t count(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(path(key) + ": expected a nonnegative integer");
        }
        return v.get<std::size_t>();
    }
    std::size_t count(const std::string& key, std::size_t fallback) {
        return has(key) ? count(key) : fallback;
    }

    std::string text(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : fallback;
    }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) throw ConfigError(path(key) + ": expected a number array");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(path(key) + ": expected a number array");
            out.push_back(e.get<double>());
        }
        return out;
    }

    Fields object(const std::string& key) {
        return Fields(raw(key), where_.empty() ? key : where_ + "." + key);
    }

    std::string path(const std::string& key) const {
        return where_.empty() ? "'" + key + "'" : "'" + where_ + "." + key + "'";
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError(path(it.key()) + ": unknown field");
            }
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

ProblemConfig parse_problem(Fields f, const fs::path& base_dir) {
    ProblemConfig pc;
    if (f.has("benchmark")) {
        pc.benchmark = parse_benchmark_id(f.text("benchmark"));
        pc.aniso_L = f.number("aniso_L", pc.aniso_L);
        if (f.has("ml") || f.has("data")) {
            throw ConfigError("'problem': give either 'benchmark' or 'ml', not both");
        }
    } else if (f.has("ml")) {
        MLProblemParams params;
        params.kind = parse_ml_kind(f.text("ml"));
        if (f.has("params")) {
            Fields p = f.object("params");
            params.svm_reg = p.number("reg", params.svm_reg);
            params.lambda = p.number("lambda", params.lambda);
            params.mu_en = p.number("mu", params.mu_en);
            p.finish();
        }
        pc.ml = params;

        Fields d = f.object("data");
        pc.data.source = d.text("source");
        if (pc.data.source == "generate") {
            if (params.kind == MLKind::svm) {
                throw ConfigError("'problem.data.source': use synthetic_svm for svm data");
            }
            pc.data.n = d.count("n", pc.data.n);
            pc.data.m = d.count("m", pc.data.m);
            pc.data.s = d.count("s", pc.data.s);
        } else if (pc.data.source == "synthetic_svm" || pc.data.source == "libsvm") {
            if (params.kind != MLKind::svm) {
                throw ConfigError("'problem.data.source': " + pc.data.source + " needs ml = svm");
            }
            if (pc.data.source == "synthetic_svm") {
                pc.data.n = d.count("n", 200);
                pc.data.d = d.count("d", pc.data.d);
                pc.data.separation = d.number("separation", pc.data.separation);
            } else {
                pc.data.path = d.text("path");
                if (pc.data.path.is_relative()) pc.data.path = base_dir / pc.data.path;
                if (!fs::exists(pc.data.path)) {
                    throw ConfigError("'problem.data.path': file not found: " +
                                      pc.data.path.string());
                }
                if (d.has("dimension")) pc.data.dimension = d.count("dimension");
            }
        } else {
            throw ConfigError("'problem.data.source': expected generate, synthetic_svm or libsvm");
        }
        d.finish();
        if (f.has("reference")) {
            Fields r = f.object("reference");
            pc.reference_effort = r.count("effort", pc.reference_effort);
            pc.reference_step = r.number("step", pc.reference_step);
            r.finish();
        }
    } else {
        throw ConfigError("'problem': needs 'benchmark' or 'ml'");
    }
    f.finish();
    return pc;
}

ScheduleConfig parse_schedule(Fields f) {
    ScheduleConfig s;
    const std::string kind = f.text("kind", "constant");
    if (kind == "constant") {
        s.kind = StepSchedule::Kind::constant;
        s.c = f.number("c");
    } else if (kind == "sequence") {
        s.kind = StepSchedule::Kind::sequence;
        s.values = f.numbers("values");
    } else if (kind == "geometric") {
        s.kind = StepSchedule::Kind::geometric;
        s.c = f.number("c");
        s.growth = f.number("growth");
    } else {
        throw ConfigError(f.path("kind") + ": expected constant, sequence or geometric");
    }
    f.finish();
    return s;
}

EstimationPlan parse_plan(Fields f) {
    EstimationPlan p;
    const std::string sampling = f.text("sampling", "grid");
    if (sampling == "grid") {
        p.sampling = EstimationPlan::Sampling::grid;
    } else if (sampling == "random") {
        p.sampling = EstimationPlan::Sampling::random;
    } else {
        throw ConfigError(f.path("sampling") + ": expected grid or random");
    }
    p.lo = f.number("lo", p.lo);
    p.hi = f.number("hi", p.hi);
    p.count = f.count("count", p.count);
    p.radius = f.number("radius", p.radius);
    p.seed = f.count("seed", 0);
    p.tau_S = f.number("tau_S", p.tau_S);
    if (f.has("nu")) p.nu = f.number("nu");
    f.finish();
    return p;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << std::setw(2) << j << '\n';
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(); }

json check_json(const CheckReport& r) {
    json j;
    j["passed"] = r.passed();
    j["steps_checked"] = r.steps.size();
    const auto v = r.first_violation();
    j["first_violation"] = v ? json(*v) : json();
    return j;
}

}  // namespace

StepSchedule ScheduleConfig::build() const {
    switch (kind) {
        case StepSchedule::Kind::constant: return StepSchedule::constant(c);
        case StepSchedule::Kind::sequence: return StepSchedule::sequence(values);
        case StepSchedule::Kind::geometric: return StepSchedule::geometric(c, growth);
    }
    return StepSchedule::constant(c);
}

ExperimentConfig parse_config(const json& j, Command cmd, const fs::path& base_dir) {
    Fields f(j, "");
    ExperimentConfig cfg;
    const std::string expected = solver_for(cmd);
    cfg.solver = f.text("solver", expected);
    if (cfg.solver != expected) {
        throw ConfigError("'solver': '" + cfg.solver + "' does not match command " +
                          to_string(cmd));
    }
    cfg.problem = parse_problem(f.object("problem"), base_dir);

    const bool runs = !expected.empty();
    const bool proximal = cmd == Command::run_ppm || cmd == Command::run_ippm;
    if (f.has("schedule")) {
        if (!proximal) throw ConfigError("'schedule': only used by run-ppm and run-ippm");
        cfg.schedule = parse_schedule(f.object("schedule"));
    } else if (proximal) {
        throw ConfigError("'schedule': required field is missing");
    }
    if (f.has("criterion")) {
        if (cmd != Command::run_ippm) throw ConfigError("'criterion': only used by run-ippm");
        Fields c = f.object("criterion");
        InexactCriterion crit;
        crit.kind = parse_criterion_kind(c.text("kind"));
        crit.eps0 = c.number("eps0", crit.eps0);
        crit.delta0 = c.number("delta0", crit.delta0);
        crit.gamma = c.number("gamma", crit.gamma);
        c.finish();
        crit.validate();
        cfg.criterion = crit;
    } else if (cmd == Command::run_ippm) {
        throw ConfigError("'criterion': required field is missing");
    }
    if (f.has("gd")) {
        if (cmd != Command::run_gd) throw ConfigError("'gd': only used by run-gd");
        Fields g = f.object("gd");
        GdConfig gc;
        gc.L = g.maybe_number("L");
        gc.mu = g.maybe_number("mu");
        gc.beta = g.maybe_number("beta");
        gc.step = g.maybe_number("step");
        g.finish();
        cfg.gd = gc;
    } else if (cmd == Command::run_gd) {
        cfg.gd = GdConfig{};
    }
    if (f.has("x0")) {
        if (!runs) throw ConfigError("'x0': only used by run commands");
        cfg.x0 = f.numbers("x0");
    }
    cfg.seed = f.count("seed", 0);
    cfg.max_iter = f.count("max_iter", cfg.max_iter);
    cfg.nu = f.maybe_number("nu");
    if (cfg.nu && !(*cfg.nu > 0.0)) throw ConfigError("'nu': must be positive");
    cfg.output = f.text("output", "");
    cfg.test_mode = f.flag("test_mode", false);
    cfg.estimate = f.flag("estimate", cmd == Command::estimate || cmd == Command::audit);
    cfg.audit = f.flag("audit", cmd == Command::audit);
    if (cfg.audit) cfg.estimate = true;
    if (f.has("plan")) cfg.plan = parse_plan(f.object("plan"));
    f.finish();
    return cfg;
}

ExperimentConfig load_config(const fs::path& path, Command cmd) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        throw ConfigError(path.string() + ":" + std::to_string(line) + ": invalid JSON: " +
                          e.what());
    }
    try {
        return parse_config(j, cmd, path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ProblemSpec build_problem(const ProblemConfig& pc, std::uint64_t seed) {
    if (pc.benchmark) return make_benchmark(*pc.benchmark, pc.aniso_L);
    const MLProblemParams& params = *pc.ml;
    ProblemSpec p;
    if (params.kind == MLKind::svm) {
        const Dataset ds = pc.data.source == "libsvm"
                               ? load_libsvm(pc.data.path.string(), pc.data.dimension)
                               : generate_svm_blobs(pc.data.n, pc.data.d, seed, pc.data.separation);
        p = make_ml_problem(params, ds);
    } else {
        const LassoData ld = generate_lasso_data(pc.data.n, pc.data.m, pc.data.s, seed);
        p = make_ml_problem(params, ld.A, ld.y);
    }
    ReferenceOptions ro;
    ro.step = pc.reference_step;
    return reference_solution(p, pc.reference_effort, ro);
}

ContractionStats contraction_stats(const IterationTrace& trace, double threshold, double floor) {
    ContractionStats s;
    const auto& rec = trace.records;
    std::size_t run = 0;
    double log_sum = 0.0;
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
        if (!rec[k].cost_gap || !rec[k + 1].cost_gap || *rec[k].cost_gap <= floor) continue;
        const double ratio = *rec[k + 1].cost_gap / *rec[k].cost_gap;
        ++s.steps;
        if (!(*rec[k + 1].cost_gap < *rec[k].cost_gap)) s.strictly_decreasing = false;
        s.max_ratio = std::max(s.max_ratio, ratio);
        log_sum += std::log(std::max(ratio, 1e-300));
        run = ratio < threshold ? run + 1 : 0;
        s.longest_run_below = std::max(s.longest_run_below, run);
    }
    if (s.steps > 0) s.geometric_mean_ratio = std::exp(log_sum / static_cast<double>(s.steps));
    return s;
}

namespace {

Vector initial_point(const ExperimentConfig& cfg, const ProblemSpec& p) {
    if (cfg.x0) {
        if (cfg.x0->size() != p.dimension) {
            throw ConfigError("'x0': expected " + std::to_string(p.dimension) + " entries");
        }
        return Eigen::Map<const Vector>(cfg.x0->data(), static_cast<Eigen::Index>(cfg.x0->size()));
    }
    const auto d = static_cast<Eigen::Index>(p.dimension);
    return cfg.problem.benchmark ? Vector(Vector::Ones(d)) : Vector(Vector::Zero(d));
}

EstimationPlan default_plan(const ExperimentConfig& cfg, const ProblemSpec& p) {
    EstimationPlan plan = cfg.plan.value_or(EstimationPlan{});
    if (!cfg.plan) {
        if (p.dimension <= 2 && cfg.problem.benchmark) {
            plan = EstimationPlan::grid(p.known.bracket_lo, p.known.bracket_hi,
                                        p.dimension == 1 ? 10001 : 40401);
        } else {
            plan = EstimationPlan::random(4000, 1.0, cfg.seed);
        }
        plan.nu = cfg.nu.value_or(p.known.default_nu);
    }
    if (plan.sampling == EstimationPlan::Sampling::random && !plan.center && p.has_solution_oracle()) {
        plan.center = p.solution(Vector::Zero(static_cast<Eigen::Index>(p.dimension))).projection;
    }
    return plan;
}

json trace_summary(const IterationTrace& t) {
    json j;
    j["solver"] = t.solver;
    j["problem"] = t.problem;
    j["iterations"] = t.iterations();
    j["stop_reason"] = t.stop_reason;
    j["final_f"] = t.records.back().f;
    j["final_cost_gap"] = optional_json(t.records.back().cost_gap);
    j["final_dist_S"] = optional_json(t.records.back().dist_S);
    j["diameter"] = t.diameter();
    j["nu"] = optional_json(t.nu);
    j["k0_empirical"] = t.k0_empirical ? json(*t.k0_empirical) : json();
    j["k0_apriori"] = optional_json(t.k0_apriori);
    const ContractionStats cs = contraction_stats(t);
    j["contraction"] = {{"steps", cs.steps},
                        {"strictly_decreasing", cs.strictly_decreasing},
                        {"longest_run_below_0.999", cs.longest_run_below},
                        {"max_ratio", cs.max_ratio},
                        {"geometric_mean_ratio", cs.geometric_mean_ratio}};
    return j;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, Command cmd, const fs::path& out_dir) {
    RunResult result;
    const fs::path dir = cfg.output.empty() ? out_dir : out_dir / cfg.output;
    fs::create_directories(dir);

    if (cmd == Command::gen_data) {
        const ProblemConfig& pc = cfg.problem;
        if (!pc.ml || pc.data.source == "libsvm") {
            throw ConfigError("'problem': gen-data needs generated ml data");
        }
        auto dump = [&](const fs::path& path, const Matrix& m) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw Error("cannot write '" + path.string() + "'");
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    out << (j ? "," : "") << format_double(m(i, j));
                }
                out << '\n';
            }
            result.artifacts.push_back(path);
        };
        if (pc.ml->kind == MLKind::svm) {
            const Dataset ds = generate_svm_blobs(pc.data.n, pc.data.d, cfg.seed, pc.data.separation);
            const fs::path path = dir / "data.libsvm";
            std::ofstream out(path, std::ios::binary);
            if (!out) throw Error("cannot write '" + path.string() + "'");
            for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
                out << (ds.labels[i] > 0 ? "+1" : "-1");
                for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
                    out << ' ' << (j + 1) << ':' << format_double(ds.features(i, j));
                }
                out << '\n';
            }
            result.artifacts.push_back(path);
        } else {
            const LassoData ld = generate_lasso_data(pc.data.n, pc.data.m, pc.data.s, cfg.seed);
            dump(dir / "A.csv", ld.A);
            dump(dir / "y.csv", ld.y);
            dump(dir / "x_hat.csv", ld.x_hat);
        }
        result.summary = {{"command", to_string(cmd)}, {"seed", cfg.seed}};
        write_json(dir / "summary.json", result.summary);
        result.artifacts.push_back(dir / "summary.json");
        return result;
    }

    const ProblemSpec p = build_problem(cfg.problem, cfg.seed);
    json summary;
    summary["command"] = to_string(cmd);
    summary["problem"] = p.name;
    summary["seed"] = cfg.seed;
    summary["optimum_value"] = optional_json(p.optimum_value);
    summary["weak_convexity"] = p.weak_convexity;
    summary["test_mode"] = cfg.test_mode;
    bool violated = false;

    std::optional<RegularityConstants> constants = p.known.sharp;
    if (cfg.estimate) {
        const EstimationPlan plan = default_plan(cfg, p);
        const RegularityReport report = estimate_constants(p, plan);
        json rj = to_json(report);
        if (cfg.audit) {
            const auto audit = audit_implications(report.constants(), p.weak_convexity);
            rj["audit"] = to_json(audit);
            summary["audit_passed"] = std::all_of(audit.begin(), audit.end(),
                                                  [](const RelationCheck& c) { return c.ok(); });
        }
        write_json(dir / "report.json", rj);
        result.artifacts.push_back(dir / "report.json");
        if (!constants) constants = report.constants();
    }

    const double nu = cfg.nu.value_or(p.known.default_nu);
    if (cmd == Command::run_ppm || cmd == Command::run_ippm || cmd == Command::run_gd) {
        const Vector x0 = initial_point(cfg, p);
        IterationTrace trace;
        json checks = json::object();
        if (cmd == Command::run_gd) {
            GDParams gp;
            const GdConfig& gc = *cfg.gd;
            gp.L = gc.L ? *gc.L : p.smoothness.value_or(0.0);
            if (!gc.mu && !p.known.gd_rsi) throw ConfigError("'gd.mu': required for " + p.name);
            if (!gc.beta && !p.known.gd_pl) throw ConfigError("'gd.beta': required for " + p.name);
            gp.mu = gc.mu ? *gc.mu : *p.known.gd_rsi;
            gp.beta = gc.beta ? *gc.beta : *p.known.gd_pl;
            gp.step = gc.step;
            trace = run_gd(p, x0, gp, cfg.max_iter);
            const GdRateReport r = verify_gd_rates(trace, gp);
            summary["bounds"] = {{"omega1", r.omega1}, {"omega2", r.omega2}, {"step", gp.t()}};
            checks["precondition"] = r.precondition_ok;
            checks["distance"] = check_json(r.distance);
            checks["cost"] = check_json(r.cost);
            checks["descent"] = check_json(r.descent);
            checks["chain"] = check_json(r.chain);
            violated = !r.bounds_hold();
        } else {
            PpmOptions po;
            po.max_iter = cfg.max_iter;
            if (std::isfinite(nu)) po.nu = nu;
            const StepSchedule sched = cfg.schedule.build();
            if (cmd == Command::run_ppm) {
                trace = run_ppm(p, x0, sched, po);
            } else {
                IppmOptions io;
                io.ppm = po;
                io.test_mode = cfg.test_mode;
                trace = run_ippm(p, x0, sched, *cfg.criterion, io);
            }
            const bool convex = p.weak_convexity == 0.0;
            const auto dist0 = trace.records.front().dist_S;
            if (cfg.test_mode && trace.optimum_value) {
                if (cmd == Command::run_ppm && convex) {
                    if (dist0) checks["sublinear"] = check_json(check_sublinear_bound(trace, *dist0));
                    if (p.has_solution_oracle()) {
                        const Vector xs = p.solution(x0).projection;
                        checks["one_step"] = check_json(check_one_step(trace, xs));
                    }
                }
                if (cmd == Command::run_ippm && convex && cfg.criterion->uses_eps() && dist0) {
                    std::optional<Vector> xs;
                    if (p.has_solution_oracle()) xs = p.solution(x0).projection;
                    checks["ippm_sublinear"] = check_json(check_ippm_sublinear(trace, dist0, xs));
                }
                if (cmd == Command::run_ippm && cfg.criterion->uses_delta() &&
                    p.has_solution_oracle()) {
                    checks["inexact_one_step"] = check_json(check_inexact_one_step(trace));
                }
            }
            if (constants && std::isfinite(nu) && p.has_solution_oracle()) {
                const RateBounds b = rate_bounds(sched.at(0), *constants, p.weak_convexity);
                summary["bounds"] = {{"omega", b.omega},       {"theta", b.theta},
                                     {"theta_qg", b.theta_qg}, {"theta_eb", b.theta_eb},
                                     {"beta", b.beta},         {"c0", sched.at(0)}};
                if (cfg.test_mode) {
                    if (cmd == Command::run_ppm) {
                        const LinearRateReport lr = check_linear_rates(trace, *constants, nu);
                        checks["linear_cost"] = check_json(lr.cost);
                        checks["linear_distance"] = check_json(lr.distance);
                    } else if (cfg.criterion->uses_delta() || cfg.criterion->is_exact()) {
                        // the θ̂ contraction is only implied by the δ-type criteria
                        const IppmLinearReport lr = check_ippm_linear(trace, *constants, nu);
                        checks["ippm_linear"] = check_json(lr.distance);
                        checks["ippm_linear"]["k_bar"] = lr.k_bar ? json(*lr.k_bar) : json();
                    }
                }
            }
            for (const auto& [name, c] : checks.items()) {
                if (c.is_object() && !c.at("passed").get<bool>()) violated = true;
            }
        }
        summary["trace"] = trace_summary(trace);
        summary["checks"] = checks;
        emit_trace_csv(trace, (dir / "trace.csv").string());
        result.artifacts.push_back(dir / "trace.csv");
    }

    if (cfg.test_mode && violated) result.exit_code = 2;
    if (cmd == Command::audit && summary.contains("audit_passed") &&
        !summary["audit_passed"].get<bool>() && cfg.test_mode) {
        result.exit_code = 2;
    }
    summary["exit_code"] = result.exit_code;
    result.summary = summary;
    write_json(dir / "summary.json", summary);
    result.artifacts.push_back(dir / "summary.json");
    return result;
}

}  // namespace proxreg
