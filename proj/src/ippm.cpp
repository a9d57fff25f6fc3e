#include "proxreg/ippm.hpp"

#include <algorithm>
#include <cmath>

#include "proximal_loop.hpp"

namespace proxreg {

std::string to_string(CriterionKind k) {
    switch (k) {
        case CriterionKind::A: return "A";
        case CriterionKind::B: return "B";
        case CriterionKind::AB: return "AB";
        case CriterionKind::Aprime: return "Aprime";
        case CriterionKind::Bprime: return "Bprime";
    }
    return "?";
}

CriterionKind parse_criterion_kind(const std::string& s) {
    if (s == "A") return CriterionKind::A;
    if (s == "B") return CriterionKind::B;
    if (s == "AB") return CriterionKind::AB;
    if (s == "Aprime" || s == "A'") return CriterionKind::Aprime;
    if (s == "Bprime" || s == "B'") return CriterionKind::Bprime;
    throw ConfigError("unknown criterion kind '" + s + "'");
}

bool InexactCriterion::uses_eps() const {
    return kind == CriterionKind::A || kind == CriterionKind::AB || kind == CriterionKind::Aprime;
}

bool InexactCriterion::uses_delta() const {
    return kind == CriterionKind::B || kind == CriterionKind::AB || kind == CriterionKind::Bprime;
}

bool InexactCriterion::needs_reference() const {
    return kind == CriterionKind::A || kind == CriterionKind::B || kind == CriterionKind::AB;
}

bool InexactCriterion::is_exact() const {
    return (!uses_eps() || eps0 == 0.0) && (!uses_delta() || delta0 == 0.0);
}

void InexactCriterion::validate() const {
    if (eps0 < 0.0 || delta0 < 0.0) throw ConfigError("criterion tolerances must be >= 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("criterion gamma must lie in (0,1)");
}

IterationTrace run_ippm(const ProblemSpec& p, const Vector& x0, const StepSchedule& sched,
                        const InexactCriterion& crit, const IppmOptions& opts) {
    crit.validate();
    if (crit.needs_reference() && !opts.test_mode) {
        throw CriterionUnverifiable("criterion " + to_string(crit.kind) +
                                    " needs the true prox and is only available in test mode");
    }
    const bool exact = crit.is_exact() || !has_inner_solver(p);

    auto stepper = [&](std::size_t k, const Vector& xk, double c) {
        detail::StepOutcome out;
        const double eps = crit.uses_eps() ? crit.eps(k) : 0.0;
        const double delta = crit.uses_delta() ? crit.delta(k) : 0.0;
        if (crit.uses_eps()) out.eps = eps;
        if (crit.uses_delta()) out.delta = delta;

        std::optional<Vector> ref;
        if (opts.test_mode) {
            ref = prox(p, xk, c, opts.reference_tol).point;
            if (p.has_solution_oracle()) out.ref_prox_dist = p.solution(*ref).distance;
        }

        auto accept = [&](const Vector& x, double r) {
            const double move = (x - xk).norm();
            switch (crit.kind) {
                case CriterionKind::Aprime: return r <= eps / c;
                case CriterionKind::Bprime:
                    // a zero step only passes with a zero residual
                    return move == 0.0 ? r == 0.0 : r <= (delta / c) * move;
                case CriterionKind::A: return (x - *ref).norm() <= eps;
                case CriterionKind::B: return (x - *ref).norm() <= delta * move;
                case CriterionKind::AB: {
                    const double err = (x - *ref).norm();
                    return err <= eps && err <= delta * move;
                }
            }
            return false;
        };

        if (exact) {
            out.prox = prox(p, xk, c, opts.ppm.inner);
        } else {
            out.prox = prox_until(p, xk, c, opts.ppm.inner.max_inner_iterations, accept);
        }
        out.criterion_ok = exact ? true : accept(out.prox.point, out.prox.residual_norm);
        if (ref) out.ref_prox_error = (out.prox.point - *ref).norm();
        return out;
    };
    return detail::run_proximal_loop(p, x0, sched, opts.ppm, "ippm-" + to_string(crit.kind),
                                     stepper);
}

namespace {
constexpr double kCheckTolerance = 1e-9;
constexpr double kRatioFloor = 1e-14;
}  // namespace

CheckReport check_ippm_sublinear(const IterationTrace& trace, std::optional<double> dist0,
                                 const std::optional<Vector>& x_star) {
    if (!trace.optimum_value) throw NotAvailable("check_ippm_sublinear: trace has no f*");
    const auto& rec = trace.records;
    if (!dist0) {
        if (rec.empty() || !rec.front().dist_S) {
            throw NotAvailable("check_ippm_sublinear: dist(x0,S) unknown");
        }
        dist0 = rec.front().dist_S;
    }
    CheckReport report;
    double sum_c = 0.0;
    double sum_eps = 0.0;
    double D = x_star ? (rec.front().x - *x_star).norm() : 0.0;
    double best = rec.front().f;
    for (std::size_t k = 1; k < rec.size(); ++k) {
        sum_c += rec[k - 1].c.value_or(0.0);
        sum_eps += rec[k - 1].eps.value_or(0.0);
        D = std::max(D, rec[k].diameter);
        // the bound needs D ≥ ‖x_k − x*‖; without x*, ‖x_k − x₀‖ + dist(x₀,S) covers it
        D = std::max(D, x_star ? (rec[k].x - *x_star).norm() : rec[k].diameter + *dist0);
        best = std::min(best, rec[k].f);
        const double lhs = best - *trace.optimum_value;
        const double rhs =
            (*dist0 * *dist0 + 2.0 * D * sum_eps) / (2.0 * sum_c) + kCheckTolerance;
        report.steps.push_back({k, lhs <= rhs, lhs, rhs});
    }
    return report;
}

double inexact_theta(double theta, double delta) { return (theta + 2.0 * delta) / (1.0 - delta); }

IppmLinearReport check_ippm_linear(const IterationTrace& trace,
                                   const RegularityConstants& constants, double nu) {
    IppmLinearReport out;
    const auto& rec = trace.records;
    std::optional<std::size_t> k_level;
    std::optional<std::size_t> k_delta;
    for (const auto& r : rec) {
        if (!k_level && r.cost_gap && *r.cost_gap <= nu) k_level = r.k;
        if (!k_delta && r.delta.value_or(0.0) < 1.0) k_delta = r.k;
    }
    if (!k_level || !k_delta) return out;
    out.k_bar = std::max(*k_level, *k_delta);
    for (std::size_t k = *out.k_bar; k + 1 < rec.size(); ++k) {
        if (!rec[k].dist_S || !rec[k + 1].dist_S || *rec[k].dist_S <= kRatioFloor) continue;
        const double theta =
            rate_bounds(rec[k].c.value_or(0.0), constants, trace.weak_convexity).theta;
        const double th = inexact_theta(theta, rec[k].delta.value_or(0.0));
        const double lhs = *rec[k + 1].dist_S;
        const double rhs = th * *rec[k].dist_S;
        out.distance.steps.push_back(
            {k, lhs <= rhs * (1.0 + kCheckTolerance) + kRatioFloor, lhs, rhs});
        out.theta_hat.push_back(th);
    }
    return out;
}

CheckReport check_inexact_one_step(const IterationTrace& trace) {
    CheckReport report;
    const auto& rec = trace.records;
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
        const auto& r = rec[k];
        if (!r.ref_prox_dist || !r.delta || !r.dist_S || !rec[k + 1].dist_S) {
            throw NotAvailable("check_inexact_one_step: needs a test-mode trace with delta and dist_S");
        }
        const double d = *r.delta;
        const double lhs = (1.0 - d) * *rec[k + 1].dist_S;
        const double rhs = 2.0 * d * *r.dist_S + *r.ref_prox_dist + kCheckTolerance;
        report.steps.push_back({k, lhs <= rhs, lhs, rhs});
    }
    return report;
}

std::vector<AveragedIterate> averaged_iterates(const ProblemSpec& p, const IterationTrace& trace) {
    if (!p.optimum_value) throw NotAvailable("averaged_iterates: f* unknown");
    const double fstar = *p.optimum_value;
    std::vector<AveragedIterate> out;
    const auto& rec = trace.records;
    if (rec.empty()) return out;
    Vector sum = Vector::Zero(rec.front().x.size());
    Vector wsum = Vector::Zero(rec.front().x.size());
    double sum_gap = 0.0;
    double wsum_gap = 0.0;
    double sum_c = 0.0;
    for (std::size_t k = 1; k < rec.size(); ++k) {
        const double c = rec[k - 1].c.value_or(1.0);
        const double gap = rec[k].f - fstar;
        sum += rec[k].x;
        wsum += c * rec[k].x;
        sum_gap += gap;
        wsum_gap += c * gap;
        sum_c += c;

        AveragedIterate a;
        a.k = k;
        a.x_bar = sum / static_cast<double>(k);
        a.x_tilde = wsum / sum_c;
        a.gap_bar = p.eval(a.x_bar) - fstar;
        a.gap_tilde = p.eval(a.x_tilde) - fstar;
        a.bound_bar = sum_gap / static_cast<double>(k);
        a.bound_tilde = wsum_gap / sum_c;
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace proxreg
