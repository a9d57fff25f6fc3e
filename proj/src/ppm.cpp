#include "proxreg/ppm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "proximal_loop.hpp"

namespace proxreg {

// ---------------------------------------------------------------------------
// StepSchedule
// ---------------------------------------------------------------------------

StepSchedule StepSchedule::constant(double c) {
    StepSchedule s;
    s.kind_ = Kind::constant;
    s.values_ = {c};
    return s;
}

StepSchedule StepSchedule::sequence(std::vector<double> values) {
    if (values.empty()) throw ConfigError("step sequence must not be empty");
    StepSchedule s;
    s.kind_ = Kind::sequence;
    s.values_ = std::move(values);
    return s;
}

StepSchedule StepSchedule::geometric(double c0, double growth) {
    if (!(growth > 0.0)) throw ConfigError("geometric schedule needs growth > 0");
    StepSchedule s;
    s.kind_ = Kind::geometric;
    s.values_ = {c0};
    s.growth_ = growth;
    return s;
}

double StepSchedule::at(std::size_t k) const {
    switch (kind_) {
        case Kind::constant: return values_.front();
        case Kind::sequence: return values_[std::min(k, values_.size() - 1)];
        case Kind::geometric: return values_.front() * std::pow(growth_, static_cast<double>(k));
    }
    return values_.front();
}

double StepSchedule::min_over(std::size_t horizon) const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < std::max<std::size_t>(horizon, 1); ++k) m = std::min(m, at(k));
    return m;
}

void StepSchedule::validate(double rho, std::size_t horizon) const {
    for (std::size_t k = 0; k < std::max<std::size_t>(horizon, 1); ++k) {
        const double c = at(k);
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw StepTooLarge("step schedule: c_" + std::to_string(k) + " is not positive");
        }
        if (rho > 0.0 && !(1.0 / c > rho)) {
            throw StepTooLarge("step schedule: 1/c_" + std::to_string(k) + " <= rho");
        }
    }
}

// ---------------------------------------------------------------------------
// Outer loop
// ---------------------------------------------------------------------------

namespace detail {

IterationTrace run_proximal_loop(const ProblemSpec& p, const Vector& x0,
                                 const StepSchedule& sched, const PpmOptions& opts,
                                 std::string solver, const Stepper& step) {
    if (static_cast<std::size_t>(x0.size()) != p.dimension) {
        throw BadShape("x0 has the wrong dimension for " + p.name);
    }
    sched.validate(p.weak_convexity, opts.max_iter);

    IterationTrace trace;
    trace.solver = std::move(solver);
    trace.problem = p.name;
    trace.optimum_value = p.optimum_value;
    trace.weak_convexity = p.weak_convexity;
    trace.records.push_back(make_record(p, trace.records, x0));
    trace.stop_reason = "max_iter";

    for (std::size_t k = 0; k < opts.max_iter; ++k) {
        const double c = sched.at(k);
        const Vector xk = trace.records.back().x;
        StepOutcome out = step(k, xk, c);

        IterationRecord& cur = trace.records.back();
        cur.c = c;
        cur.residual_norm = out.prox.residual_norm;
        cur.inner_iterations = out.prox.inner_iterations;
        cur.eps = out.eps;
        cur.delta = out.delta;
        cur.criterion_ok = out.criterion_ok;
        cur.ref_prox_dist = out.ref_prox_dist;
        cur.ref_prox_error = out.ref_prox_error;

        IterationRecord next = make_record(p, trace.records, out.prox.point);
        const double movement = (next.x - xk).norm() / c;
        const bool gap_done = next.cost_gap && *next.cost_gap <= opts.stop_gap;
        trace.records.push_back(std::move(next));
        if (gap_done) {
            trace.stop_reason = "cost_gap";
            break;
        }
        if (movement <= opts.stop_residual) {
            trace.stop_reason = "stationary";
            break;
        }
    }
    if (opts.nu) annotate_sublevel_entry(trace, *opts.nu);
    return trace;
}

}  // namespace detail

IterationTrace run_ppm(const ProblemSpec& p, const Vector& x0, const StepSchedule& sched,
                       const PpmOptions& opts) {
    return detail::run_proximal_loop(
        p, x0, sched, opts, "ppm", [&](std::size_t, const Vector& x, double c) {
            detail::StepOutcome out;
            out.prox = prox(p, x, c, opts.inner);
            return out;
        });
}

// ---------------------------------------------------------------------------
// Bound checks
// ---------------------------------------------------------------------------

RateBounds rate_bounds(double c, const RegularityConstants& k, double rho) {
    RateBounds b;
    b.omega = k.mu_p > 0.0 ? 2.0 / (2.0 + k.mu_p * c) : 1.0;
    b.beta = k.mu_q - 0.5 * rho;
    b.theta_qg = b.beta > 0.0 ? 1.0 / std::sqrt(2.0 * c * b.beta + 1.0) : 1.0;
    b.theta_eb = (std::isfinite(k.mu_e) && k.mu_e > 0.0)
                     ? 1.0 / std::sqrt(c * c / (k.mu_e * k.mu_e) + 1.0)
                     : 1.0;
    b.theta = std::min(b.theta_qg, b.theta_eb);
    return b;
}

bool CheckReport::passed() const {
    return std::all_of(steps.begin(), steps.end(), [](const StepCheck& s) { return s.ok; });
}

std::optional<std::size_t> CheckReport::first_violation() const {
    for (const auto& s : steps) {
        if (!s.ok) return s.k;
    }
    return std::nullopt;
}

namespace {
constexpr double kCheckTolerance = 1e-9;
constexpr double kRatioFloor = 1e-14;

double step_slack(const IterationRecord& r, double dist_next_to_star) {
    const double res = r.residual_norm.value_or(0.0);
    return 2.0 * r.c.value_or(0.0) * res * dist_next_to_star;
}
}  // namespace

CheckReport check_sublinear_bound(const IterationTrace& trace, double dist0) {
    if (!trace.optimum_value) throw NotAvailable("check_sublinear_bound: trace has no f*");
    CheckReport report;
    const auto& rec = trace.records;
    double sum_c = 0.0;
    double slack = 0.0;
    for (std::size_t k = 1; k < rec.size(); ++k) {
        const auto& prev = rec[k - 1];
        sum_c += prev.c.value_or(0.0);
        // ‖x_k − Π_S(x₀)‖ ≤ ‖x_k − x₀‖ + dist(x₀, S)
        slack += step_slack(prev, (rec[k].x - rec.front().x).norm() + dist0);
        const double lhs = rec[k].f - *trace.optimum_value;
        const double rhs = (dist0 * dist0 + slack) / (2.0 * sum_c) + kCheckTolerance;
        report.steps.push_back({k, lhs <= rhs, lhs, rhs});
    }
    return report;
}

CheckReport check_one_step(const IterationTrace& trace, const Vector& x_star) {
    if (!trace.optimum_value) throw NotAvailable("check_one_step: trace has no f*");
    CheckReport report;
    const auto& rec = trace.records;
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
        const double c = rec[k].c.value_or(0.0);
        const double d_next = (rec[k + 1].x - x_star).norm();
        const double d_cur = (rec[k].x - x_star).norm();
        const double lhs = 2.0 * c * (rec[k + 1].f - *trace.optimum_value);
        const double rhs =
            d_cur * d_cur - d_next * d_next + step_slack(rec[k], d_next) + kCheckTolerance;
        report.steps.push_back({k, lhs <= rhs, lhs, rhs});
    }
    return report;
}

LinearRateReport check_linear_rates(const IterationTrace& trace,
                                    const RegularityConstants& constants, double nu) {
    LinearRateReport out;
    const auto& rec = trace.records;
    for (const auto& r : rec) {
        if (r.cost_gap && *r.cost_gap <= nu) {
            out.k0 = r.k;
            break;
        }
    }
    if (!out.k0) return out;
    for (std::size_t k = *out.k0; k + 1 < rec.size(); ++k) {
        const RateBounds b = rate_bounds(rec[k].c.value_or(0.0), constants, trace.weak_convexity);
        if (rec[k].cost_gap && rec[k + 1].cost_gap && *rec[k].cost_gap > kRatioFloor) {
            const double lhs = *rec[k + 1].cost_gap;
            const double rhs = b.omega * *rec[k].cost_gap;
            out.cost.steps.push_back({k, lhs <= rhs * (1.0 + kCheckTolerance) + kRatioFloor, lhs, rhs});
        }
        if (rec[k].dist_S && rec[k + 1].dist_S && *rec[k].dist_S > kRatioFloor) {
            const double lhs = *rec[k + 1].dist_S;
            const double rhs = b.theta * *rec[k].dist_S;
            out.distance.steps.push_back(
                {k, lhs <= rhs * (1.0 + kCheckTolerance) + kRatioFloor, lhs, rhs});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reference solve
// ---------------------------------------------------------------------------

ProblemSpec reference_solution(const ProblemSpec& p, std::size_t effort,
                               const ReferenceOptions& opts) {
    ProblemSpec blind = p;
    blind.optimum_value.reset();
    blind.solution = nullptr;

    PpmOptions po;
    po.max_iter = std::max<std::size_t>(effort, 1);
    po.inner = InnerTolerance{1e-12, 200000};
    po.stop_residual = 1e-14;
    const Vector x0 = opts.x0.value_or(Vector::Zero(static_cast<Eigen::Index>(p.dimension)));
    const IterationTrace t = run_ppm(blind, x0, StepSchedule::constant(opts.step), po);

    const auto best = std::min_element(
        t.records.begin(), t.records.end(),
        [](const IterationRecord& a, const IterationRecord& b) { return a.f < b.f; });

    ProblemSpec out = p;
    out.optimum_value = best->f;
    out.reference_residual = min_norm_subgradient(p, best->x).norm;
    if (p.strong_convexity && *p.strong_convexity > 0.0) {
        const Vector star = best->x;
        out.solution = [star](const Vector& x) { return SolutionInfo{star, (x - star).norm()}; };
    } else {
        out.solution = nullptr;
    }
    return out;
}

}  // namespace proxreg
