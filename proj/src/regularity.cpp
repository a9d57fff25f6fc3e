#include "proxreg/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace proxreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEbCap = 1e12;

nlohmann::json vector_json(const Vector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

nlohmann::json number_json(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

// signed min-norm subgradient of a 1D problem
double scalar_slope(const ProblemSpec& p, double x) {
    const Subdifferential s = p.subgradient(scalar(x));
    if (!s.exact) return s.element[0];
    const double lo = s.exact->lower[0];
    const double hi = s.exact->upper[0];
    if (lo > 0.0) return lo;
    if (hi < 0.0) return hi;
    return 0.0;
}
}  // namespace

// ---------------------------------------------------------------------------
// Plan and sampling
// ---------------------------------------------------------------------------

EstimationPlan EstimationPlan::grid(double lo, double hi, std::size_t count, double nu) {
    EstimationPlan p;
    p.sampling = Sampling::grid;
    p.lo = lo;
    p.hi = hi;
    p.count = count;
    p.nu = nu;
    return p;
}

EstimationPlan EstimationPlan::random(std::size_t count, double radius, std::uint64_t seed,
                                      double nu) {
    EstimationPlan p;
    p.sampling = Sampling::random;
    p.count = count;
    p.radius = radius;
    p.seed = seed;
    p.nu = nu;
    return p;
}

void EstimationPlan::validate(std::size_t dimension) const {
    if (count < 100) throw ConfigError("estimation plan needs at least 100 samples");
    if (!(nu > 0.0)) throw ConfigError("estimation plan needs nu > 0");
    if (!(tau_S >= 0.0)) throw ConfigError("estimation plan needs tau_S >= 0");
    if (sampling == Sampling::grid) {
        if (!(lo < hi)) throw ConfigError("estimation grid needs lo < hi");
        if (dimension > 2) throw ConfigError("grid sampling is limited to dimension <= 2");
    } else {
        if (!(radius > 0.0)) throw ConfigError("random sampling needs radius > 0");
        if (center && static_cast<std::size_t>(center->size()) != dimension) {
            throw BadShape("sampling center has the wrong dimension");
        }
    }
}

std::vector<Vector> sample_points(const EstimationPlan& plan, std::size_t dimension) {
    plan.validate(dimension);
    std::vector<Vector> out;
    const auto d = static_cast<Eigen::Index>(dimension);
    if (plan.sampling == EstimationPlan::Sampling::grid) {
        auto axis = [&](std::size_t n) {
            std::vector<double> a(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = plan.lo + (plan.hi - plan.lo) * static_cast<double>(i) /
                                     static_cast<double>(n - 1);
            }
            return a;
        };
        if (dimension == 1) {
            for (double v : axis(plan.count)) out.push_back(scalar(v));
        } else {
            const auto n = static_cast<std::size_t>(
                std::ceil(std::sqrt(static_cast<double>(plan.count))));
            const auto a = axis(n);
            for (double u : a) {
                for (double v : a) {
                    Vector x(2);
                    x << u, v;
                    out.push_back(x);
                }
            }
        }
        return out;
    }
    std::mt19937_64 rng(plan.seed);
    std::uniform_real_distribution<double> unif(-plan.radius, plan.radius);
    const Vector c = plan.center.value_or(Vector::Zero(d));
    out.reserve(plan.count);
    for (std::size_t i = 0; i < plan.count; ++i) {
        Vector x(d);
        for (Eigen::Index j = 0; j < d; ++j) x[j] = c[j] + unif(rng);
        out.push_back(x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

RegularityConstants RegularityReport::constants() const {
    RegularityConstants k;
    k.mu_s = mu_s.value;
    k.mu_r = mu_r.value;
    k.mu_e = mu_e.value;
    k.mu_p = mu_p.value;
    k.mu_q = mu_q.value;
    return k;
}

namespace {

struct Sample {
    Vector x;
    double f = 0.0;
    double gap = 0.0;
    double dist = 0.0;
    Vector proj;
    Vector g;  ///< min-norm subgradient
    double gnorm = 0.0;
    bool approximate = false;
};

// sup over g ∈ ∂f(x) of ⟨g, d⟩ when the subdifferential is a box
double worst_inner(const Subdifferential& s, const Vector& d) {
    if (!s.exact) return s.element.dot(d);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        acc += d[i] * (d[i] > 0.0 ? s.exact->upper[i] : s.exact->lower[i]);
    }
    return acc;
}

}  // namespace

RegularityReport estimate_constants(const ProblemSpec& p, const EstimationPlan& plan) {
    if (!p.optimum_value || !p.has_solution_oracle()) {
        throw NeedsReference("estimate_constants: " + p.name + " needs f* and a solution oracle");
    }
    const double fstar = *p.optimum_value;
    const double root_tau = std::sqrt(plan.tau_S);

    std::vector<Sample> admitted;
    for (const Vector& x : sample_points(plan, p.dimension)) {
        const ExtendedReal v = p.value(x);
        if (!v.is_finite()) continue;
        Sample s;
        s.x = x;
        s.f = v.value();
        s.gap = s.f - fstar;
        if (s.gap > plan.nu) continue;
        const SolutionInfo sol = p.solution(x);
        s.dist = sol.distance;
        s.proj = sol.projection;
        const MinNormSubgradient mn = min_norm_subgradient(p, x);
        s.g = mn.vector;
        s.gnorm = mn.norm;
        s.approximate = mn.approximate;
        admitted.push_back(std::move(s));
    }

    RegularityReport r;
    r.problem = p.name;
    r.nu = plan.nu;
    r.samples_admitted = admitted.size();

    double q = kInf, pl = kInf, rsi = kInf, eb = 0.0;
    bool any_approx = false;
    for (const auto& s : admitted) {
        any_approx = any_approx || s.approximate;
        if (s.gap < plan.tau_S || s.dist < root_tau) continue;
        const double d2 = s.dist * s.dist;
        if (s.gap / d2 < q) {
            q = s.gap / d2;
            r.mu_q.witness = s.x;
        }
        if (s.gnorm * s.gnorm / s.gap < pl) {
            pl = s.gnorm * s.gnorm / s.gap;
            r.mu_p.witness = s.x;
        }
        const double rs = s.g.dot(s.x - s.proj) / d2;
        if (rs < rsi) {
            rsi = rs;
            r.mu_r.witness = s.x;
        }
        const double e = s.gnorm > 0.0 ? s.dist / s.gnorm : kInf;
        if (e > eb) {
            eb = e;
            r.mu_e.witness = s.x;
        }
        if (s.gnorm == 0.0) {
            r.stationary_points.push_back(s.x);
        }
    }
    r.mu_q.value = std::isfinite(q) ? q : 0.0;
    r.mu_p.value = std::isfinite(pl) ? pl : 0.0;
    r.mu_r.value = std::isfinite(rsi) ? rsi : 0.0;
    r.mu_e.value = eb > kEbCap ? kInf : eb;

    // sampled grids rarely land on a stationary point exactly; bisect in 1D
    if (p.dimension == 1 && !admitted.empty()) {
        double lo = kInf, hi = -kInf;
        for (const auto& s : admitted) {
            lo = std::min(lo, s.x[0]);
            hi = std::max(hi, s.x[0]);
        }
        if (lo < hi) {
            for (const auto& sp : find_suboptimal_stationary_points(p, lo, hi)) {
                if (sp.gap <= plan.nu) r.stationary_points.push_back(scalar(sp.x));
            }
        }
    }
    if (!r.stationary_points.empty()) {
        r.pl_fails_globally = true;
        r.eb_fails_globally = true;
        r.mu_p.value = 0.0;
        r.mu_p.witness = r.stationary_points.front();
        r.mu_e.value = kInf;
        r.mu_e.witness = r.stationary_points.front();
    }
    if (!std::isfinite(r.mu_e.value)) r.eb_fails_globally = true;
    if (r.mu_p.value <= 0.0 && !admitted.empty()) r.pl_fails_globally = true;

    // SC over ordered pairs of a thinned subset of the admitted points
    std::vector<const Sample*> thin;
    const std::size_t stride =
        std::max<std::size_t>(1, (admitted.size() + plan.sc_max_points - 1) / plan.sc_max_points);
    for (std::size_t i = 0; i < admitted.size(); i += stride) thin.push_back(&admitted[i]);
    double sc = kInf;
    bool sc_exact = true;
    for (const Sample* a : thin) {
        const Subdifferential sub = p.subgradient(a->x);
        sc_exact = sc_exact && sub.exact.has_value();
        for (const Sample* b : thin) {
            if (a == b) continue;
            const Vector d = b->x - a->x;
            const double n2 = d.squaredNorm();
            if (n2 <= 0.0) continue;
            const double v = (b->f - a->f - worst_inner(sub, d)) / n2;
            if (v < sc) {
                sc = v;
                r.mu_s.witness = a->x;
            }
        }
    }
    r.mu_s.value = std::isfinite(sc) ? sc : 0.0;

    for (ConstantEstimate* c : {&r.mu_s, &r.mu_r, &r.mu_p, &r.mu_q}) {
        if (c->value < 0.0) {
            c->value = 0.0;
            c->clamped = true;
        }
    }
    if (any_approx) {
        r.mu_e.bound_direction = "upper_bound";
        r.mu_p.bound_direction = "lower_bound";
        r.mu_r.bound_direction = "approximate";
    }
    if (!sc_exact) r.mu_s.bound_direction = "approximate";
    return r;
}

nlohmann::json to_json(const RegularityReport& r) {
    nlohmann::json j;
    j["problem"] = r.problem;
    j["nu"] = number_json(r.nu);
    j["samples_admitted"] = r.samples_admitted;
    auto one = [](const ConstantEstimate& c) {
        nlohmann::json e;
        e["value"] = number_json(c.value);
        e["witness"] = c.witness ? vector_json(*c.witness) : nlohmann::json();
        e["bound_direction"] = c.bound_direction;
        e["clamped"] = c.clamped;
        return e;
    };
    j["constants"] = {{"mu_s", one(r.mu_s)}, {"mu_r", one(r.mu_r)}, {"mu_e", one(r.mu_e)},
                      {"mu_p", one(r.mu_p)}, {"mu_q", one(r.mu_q)}};
    j["flags"] = {{"pl_fails_globally", r.pl_fails_globally},
                  {"eb_fails_globally", r.eb_fails_globally}};
    nlohmann::json sp = nlohmann::json::array();
    for (const auto& x : r.stationary_points) sp.push_back(vector_json(x));
    j["stationary_points"] = sp;
    return j;
}

// ---------------------------------------------------------------------------
// Implication audit
// ---------------------------------------------------------------------------

std::string to_string(RelationStatus s) {
    switch (s) {
        case RelationStatus::pass: return "pass";
        case RelationStatus::fail: return "fail";
        case RelationStatus::premise_fails: return "premise_fails";
        case RelationStatus::not_triggered: return "not_triggered";
    }
    return "?";
}

std::vector<RelationCheck> audit_implications(const RegularityConstants& k, double rho) {
    const double tol = kAuditTolerance;
    const bool eb_ok = std::isfinite(k.mu_e) && k.mu_e > 0.0;
    std::vector<RelationCheck> out;

    auto lower = [&](int id, std::string rel, bool premise, double observed, double expected) {
        RelationCheck c{id, std::move(rel), expected, observed, RelationStatus::pass};
        if (!premise) {
            c.status = RelationStatus::premise_fails;
        } else if (!(observed >= (1.0 - tol) * expected)) {
            c.status = RelationStatus::fail;
        }
        out.push_back(c);
    };
    auto upper = [&](int id, std::string rel, bool premise, double observed, double expected) {
        RelationCheck c{id, std::move(rel), expected, observed, RelationStatus::pass};
        if (!premise) {
            c.status = RelationStatus::premise_fails;
        } else if (!(observed <= (1.0 + tol) * expected)) {
            c.status = RelationStatus::fail;
        }
        out.push_back(c);
    };

    lower(1, "mu_r >= mu_s", k.mu_s > 0.0, k.mu_r, k.mu_s);
    upper(2, "mu_e <= 1/mu_r", k.mu_r > 0.0, k.mu_e, k.mu_r > 0.0 ? 1.0 / k.mu_r : kInf);
    lower(3, "mu_p >= 2/(2 mu_e + rho mu_e^2)", eb_ok, k.mu_p,
          eb_ok ? 2.0 / (2.0 * k.mu_e + rho * k.mu_e * k.mu_e) : 0.0);
    upper(4, "mu_e <= 2/mu_p", k.mu_p > 0.0, k.mu_e, k.mu_p > 0.0 ? 2.0 / k.mu_p : kInf);
    lower(5, "mu_q >= 1/(4 mu_e)", eb_ok, k.mu_q, eb_ok ? 1.0 / (4.0 * k.mu_e) : 0.0);

    const bool triggered = rho == 0.0 || k.mu_q > rho / 2.0;
    if (triggered) {
        lower(6, "mu_r >= mu_q - rho/2", k.mu_q > rho / 2.0, k.mu_r, k.mu_q - rho / 2.0);
    } else {
        out.push_back({6, "mu_r >= mu_q - rho/2", k.mu_q - rho / 2.0, k.mu_r,
                       RelationStatus::not_triggered});
    }
    return out;
}

nlohmann::json to_json(const std::vector<RelationCheck>& audit) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : audit) {
        a.push_back({{"id", c.id},
                     {"relation", c.relation},
                     {"expected", number_json(c.expected)},
                     {"observed", number_json(c.observed)},
                     {"status", to_string(c.status)},
                     {"pass", c.ok()}});
    }
    return a;
}

// ---------------------------------------------------------------------------
// Stationary points and weak convexity
// ---------------------------------------------------------------------------

std::vector<StationaryPoint> find_suboptimal_stationary_points(const ProblemSpec& p, double lo,
                                                               double hi,
                                                               std::size_t scan_points) {
    if (p.dimension != 1) throw BadShape("find_suboptimal_stationary_points is 1D only");
    if (!p.optimum_value) throw NeedsReference("find_suboptimal_stationary_points needs f*");
    if (!(lo < hi) || scan_points < 2) throw ConfigError("bad stationary point bracket");
    const double fstar = *p.optimum_value;

    std::vector<StationaryPoint> out;
    auto keep = [&](double x, std::string kind) {
        if (std::abs(scalar_slope(p, x)) >= 1e-8) return;
        const double gap = p.eval(scalar(x)) - fstar;
        if (gap <= 1e-6) return;
        for (const auto& s : out) {
            if (std::abs(s.x - x) < 1e-9) return;
        }
        out.push_back({x, gap, std::move(kind)});
    };

    double xa = lo;
    double ga = scalar_slope(p, xa);
    for (std::size_t i = 1; i < scan_points; ++i) {
        const double xb =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(scan_points - 1);
        const double gb = scalar_slope(p, xb);
        if (ga == 0.0) {
            keep(xa, "saddle");
        } else if ((ga < 0.0) != (gb < 0.0) && gb != 0.0) {
            double a = xa, b = xb;
            const double sa = ga;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
                const double m = 0.5 * (a + b);
                const double gm = scalar_slope(p, m);
                if (gm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((gm < 0.0) == (sa < 0.0)) {
                    a = m;
                } else {
                    b = m;
                }
            }
            const double root = std::abs(scalar_slope(p, a)) <= std::abs(scalar_slope(p, b)) ? a : b;
            keep(root, sa < 0.0 ? "local_min" : "local_max");
        }
        xa = xb;
        ga = gb;
    }
    if (ga == 0.0) keep(xa, "saddle");
    std::sort(out.begin(), out.end(),
              [](const StationaryPoint& a, const StationaryPoint& b) { return a.x < b.x; });
    return out;
}

WeakConvexityCheck verify_weak_convexity(const ProblemSpec& p, double rho, std::size_t samples,
                                         double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(lo, hi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(p.dimension);
    WeakConvexityCheck out;
    for (std::size_t i = 0; i < samples; ++i) {
        Vector x(d), y(d);
        for (Eigen::Index j = 0; j < d; ++j) {
            x[j] = box(rng);
            y[j] = box(rng);
        }
        const double lambda = unit(rng);
        if (!p.value(x).is_finite() || !p.value(y).is_finite()) continue;
        if (secant_inequality_holds(p, x, y, lambda, rho)) continue;
        const double lhs = p.eval(lambda * x + (1.0 - lambda) * y);
        const double rhs = lambda * p.eval(x) + (1.0 - lambda) * p.eval(y) +
                           0.5 * rho * lambda * (1.0 - lambda) * (x - y).squaredNorm();
        const double violation = lhs - rhs;
        if (violation > out.violation) {
            out.holds = false;
            out.x = x;
            out.y = y;
            out.lambda = lambda;
            out.violation = violation;
        }
    }
    return out;
}

}  // namespace proxreg
