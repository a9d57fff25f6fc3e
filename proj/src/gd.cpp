#include "proxreg/gd.hpp"

#include <algorithm>
#include <cmath>

namespace proxreg {

void GDParams::validate() const {
    if (!(L > 0.0) || !(mu > 0.0) || !(beta > 0.0)) {
        throw ConfigError("gd params: L, mu and beta must be positive");
    }
    if (mu > L) throw ConfigError("gd params: mu must not exceed L");
    if (beta > L * L * L / (2.0 * mu * L - mu * mu) * (1.0 + 1e-12)) {
        throw ConfigError("gd params: beta exceeds L^3/(2 mu L - mu^2)");
    }
    if (!(t() > 0.0)) throw ConfigError("gd params: step must be positive");
}

double GDParams::omega1() const { return std::sqrt(std::max(0.0, 1.0 - mu * mu / (L * L))); }

double GDParams::omega2() const {
    return (L * L * L - 2.0 * mu * L * beta + mu * mu * beta) / (L * L * L);
}

GDParams gd_params_from(const ProblemSpec& p) {
    if (!p.smoothness || !p.known.gd_rsi || !p.known.gd_pl) {
        throw NotAvailable("no gradient descent constants recorded for " + p.name);
    }
    GDParams g;
    g.L = *p.smoothness;
    g.mu = *p.known.gd_rsi;
    g.beta = *p.known.gd_pl;
    return g;
}

IterationTrace run_gd(const ProblemSpec& p, const Vector& x0, const GDParams& params,
                      std::size_t iters) {
    if (!p.smoothness) throw NotSmooth(p.name + " has no gradient Lipschitz constant");
    params.validate();
    if (static_cast<std::size_t>(x0.size()) != p.dimension) {
        throw BadShape("x0 has the wrong dimension for " + p.name);
    }
    const double t = params.t();

    IterationTrace trace;
    trace.solver = "gd";
    trace.problem = p.name;
    trace.optimum_value = p.optimum_value;
    trace.weak_convexity = p.weak_convexity;
    trace.records.push_back(make_record(p, trace.records, x0));
    trace.stop_reason = "max_iter";
    for (std::size_t k = 0; k < iters; ++k) {
        const Vector x = trace.records.back().x;
        const Vector g = p.subgradient(x).element;
        IterationRecord& cur = trace.records.back();
        cur.residual_norm = g.norm();
        if (g.norm() == 0.0) {
            trace.stop_reason = "stationary";
            break;
        }
        cur.c = t;
        trace.records.push_back(make_record(p, trace.records, Vector(x - t * g)));
    }
    return trace;
}

bool GdRateReport::bounds_hold() const {
    return distance.passed() && cost.passed() && descent.passed() && chain.passed();
}

namespace {
constexpr double kRatioFloor = 1e-14;
constexpr double kRel = 1e-9;

bool within(double lhs, double rhs) { return lhs <= rhs + kRel * std::abs(rhs) + 1e-15; }
}  // namespace

GdRateReport verify_gd_rates(const IterationTrace& trace, const GDParams& params) {
    GdRateReport out;
    const double L = params.L;
    const double mu = params.mu;
    const double t = params.t();
    const double nominal = mu / (L * L);
    out.precondition_ok = t > 0.0 && t < 2.0 / L && std::abs(t - nominal) <= 1e-12 * nominal;

    const double chain_factor = 1.0 - 2.0 * t * mu + t * t * L * L;
    out.omega1 = std::sqrt(std::max(0.0, chain_factor));
    out.omega2 = 1.0 - (2.0 * t - L * t * t) * params.beta;

    const auto& rec = trace.records;
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
        const auto& a = rec[k];
        const auto& b = rec[k + 1];
        if (a.dist_S && b.dist_S) {
            const double d0 = *a.dist_S;
            const double d1 = *b.dist_S;
            if (d0 > kRatioFloor) {
                out.distance.steps.push_back({k, within(d1, out.omega1 * d0), d1, out.omega1 * d0});
            }
            out.chain.steps.push_back({k, within(d1 * d1, chain_factor * d0 * d0), d1 * d1,
                                       chain_factor * d0 * d0});
        }
        if (a.cost_gap && b.cost_gap && *a.cost_gap > kRatioFloor) {
            out.cost.steps.push_back({k, within(*b.cost_gap, out.omega2 * *a.cost_gap),
                                      *b.cost_gap, out.omega2 * *a.cost_gap});
        }
        const double g = a.residual_norm.value_or(0.0);
        const double rhs = 0.5 * (-2.0 * t + L * t * t) * g * g;
        out.descent.steps.push_back(
            {k, b.f - a.f <= rhs + kRel * (std::abs(a.f) + std::abs(rhs)) + 1e-15, b.f - a.f, rhs});
    }
    return out;
}

}  // namespace proxreg
