#include "proxreg/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <type_traits>
#include <vector>

#include "proxreg/hinge.hpp"

namespace proxreg {

namespace {

/// Keeps the lowest-residual candidate seen, for the InnerBudgetExhausted payload.
struct BestTracker {
    ProxResult best;
    bool any = false;

    void offer(const Vector& x, const Vector& element, double norm, std::size_t iters) {
        if (!any || norm < best.residual_norm) {
            best.point = x;
            best.residual_element = element;
            best.residual_norm = norm;
            any = true;
        }
        best.inner_iterations = iters;
    }

    [[noreturn]] void exhausted(const char* solver) const {
        throw InnerBudgetExhausted(std::string(solver) + ": inner iteration budget exhausted " +
                                       "(best residual " + std::to_string(best.residual_norm) + ")",
                                   best);
    }
};

ProxResult accept(const Vector& x, Vector element, double norm, std::size_t iters) {
    ProxResult r;
    r.point = x;
    r.residual_element = std::move(element);
    r.residual_norm = norm;
    r.inner_iterations = iters;
    r.exact = (norm == 0.0);
    return r;
}

/// Min-norm element of ∂F(x) for the composite subproblem F.
Vector composite_residual(const CompositeStructure& cs, const Vector& x, const Vector& z,
                          double c) {
    Vector s = cs.A.transpose() * (cs.A * x - cs.y) + cs.l2 * x + (x - z) / c;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (x[i] > 0.0) {
            s[i] += cs.l1;
        } else if (x[i] < 0.0) {
            s[i] -= cs.l1;
        } else {
            s[i] -= std::clamp(s[i], -cs.l1, cs.l1);
        }
    }
    return s;
}

struct Interval {
    double lo;
    double hi;

    double dist_to_zero() const { return std::max({0.0, lo, -hi}); }
    bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
};

Interval subproblem_interval(const ProblemSpec& p, double x, double z, double c) {
    const Subdifferential sd = p.subgradient(scalar(x));
    const double shift = (x - z) / c;
    if (sd.exact) return {sd.exact->lower[0] + shift, sd.exact->upper[0] + shift};
    return {sd.element[0] + shift, sd.element[0] + shift};
}

double interval_element(const Interval& h) {
    return std::clamp(0.0, h.lo, h.hi);
}

}  // namespace

void validate_step(const ProblemSpec& p, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw StepTooLarge("proximal step c must be a positive finite number");
    }
    if (p.weak_convexity > 0.0 && !(1.0 / c > p.weak_convexity)) {
        throw StepTooLarge("proximal step violates 1/c > rho (c = " + std::to_string(c) +
                           ", rho = " + std::to_string(p.weak_convexity) + ")");
    }
}

std::pair<Vector, double> residual_certificate(const ProblemSpec& p, const Vector& x,
                                               const Vector& z, double c) {
    if (!p.value(x).is_finite()) throw DomainError("residual_certificate: x outside dom f");
    const Vector shift = (x - z) / c;
    Vector v;
    if (const auto* hs = std::get_if<HingeStructure>(&p.structure)) {
        v = hinge_element(*hs, x, shift).element;
    } else {
        const Subdifferential sd = p.subgradient(x);
        if (sd.exact) {
            v = sd.exact->closest_to_negative(shift) + shift;
        } else {
            v = sd.element + shift;
        }
    }
    const double n = v.norm();
    return {std::move(v), n};
}

bool has_inner_solver(const ProblemSpec& p) {
    return !std::holds_alternative<std::monostate>(p.structure);
}

ProxResult inner_solve_composite(const CompositeStructure& cs, const Vector& z, double c,
                                 std::size_t max_inner_iterations, const StopRule& stop) {
    const double strong = cs.l2 + 1.0 / c;
    const double lip = cs.smooth_lipschitz + strong;
    const double t = 1.0 / lip;
    const double momentum = (std::sqrt(lip) - std::sqrt(strong)) / (std::sqrt(lip) + std::sqrt(strong));

    BestTracker tracker;
    Vector x = z;
    {
        Vector r = composite_residual(cs, x, z, c);
        const double rn = r.norm();
        if (stop(x, rn)) return accept(x, std::move(r), rn, 0);
        tracker.offer(x, r, rn, 0);
    }

    Vector y = x;
    for (std::size_t it = 1; it <= max_inner_iterations; ++it) {
        const Vector grad = cs.A.transpose() * (cs.A * y - cs.y) + cs.l2 * y + (y - z) / c;
        Vector x_new = y - t * grad;
        for (Eigen::Index i = 0; i < x_new.size(); ++i) {
            x_new[i] = soft_threshold(x_new[i], t * cs.l1);
        }
        Vector r = composite_residual(cs, x_new, z, c);
        const double rn = r.norm();
        if (stop(x_new, rn)) return accept(x_new, std::move(r), rn, it);
        tracker.offer(x_new, r, rn, it);
        y = x_new + momentum * (x_new - x);
        x = std::move(x_new);
    }
    tracker.exhausted("inner_solve_composite");
}

ProxResult inner_solve_svm_dual(const HingeStructure& hs, const Vector& z, double c,
                                std::size_t max_inner_iterations, const StopRule& stop) {
    const Eigen::Index n = hs.features.rows();
    const double upper = 1.0 / static_cast<double>(n);
    const double sigma = hs.reg + 1.0 / c;

    BestTracker tracker;
    {
        HingeElement e = hinge_element(hs, z, Vector::Zero(z.size()));
        if (stop(z, e.norm)) return accept(z, std::move(e.element), e.norm, 0);
        tracker.offer(z, e.element, e.norm, 0);
    }

    const Vector sq_norms = hs.features.rowwise().squaredNorm();
    Vector alpha = Vector::Zero(n);
    Vector x = z / (c * sigma);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(0x5eed);

    for (std::size_t sweep = 1; sweep <= max_inner_iterations; ++sweep) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index i : order) {
            if (sq_norms[i] == 0.0) continue;
            const double margin = 1.0 - hs.labels[i] * hs.features.row(i).dot(x);
            const double next = std::clamp(alpha[i] + sigma * margin / sq_norms[i], 0.0, upper);
            const double delta = next - alpha[i];
            if (delta != 0.0) {
                alpha[i] = next;
                x += (delta * hs.labels[i] / sigma) * hs.features.row(i).transpose();
            }
        }
        const Vector slopes = alpha * static_cast<double>(n);
        HingeElement e = hinge_element(hs, x, (x - z) / c, &slopes);
        if (stop(x, e.norm)) return accept(x, std::move(e.element), e.norm, sweep);
        tracker.offer(x, e.element, e.norm, sweep);
    }
    tracker.exhausted("inner_solve_svm_dual");
}

ProxResult inner_solve_scalar(const ProblemSpec& p, const ScalarStructure& ss, const Vector& z,
                              double c, std::size_t max_inner_iterations, const StopRule& stop) {
    if (p.dimension != 1) throw BadShape("inner_solve_scalar: problem is not one-dimensional");
    const double zc = z[0];
    const double modulus = 1.0 / c - p.weak_convexity;
    BestTracker tracker;
    std::size_t iters = 0;

    auto try_point = [&](double x, const Interval& h) -> bool {
        const double rn = h.dist_to_zero();
        const Vector xv = scalar(x);
        if (stop(xv, rn)) return true;
        tracker.offer(xv, scalar(interval_element(h)), rn, iters);
        return false;
    };
    auto result = [&](double x, const Interval& h) {
        return accept(scalar(x), scalar(interval_element(h)), h.dist_to_zero(), iters);
    };

    Interval hz = subproblem_interval(p, zc, zc, c);
    if (try_point(zc, hz)) return result(zc, hz);
    if (hz.contains_zero()) tracker.exhausted("inner_solve_scalar");

    // The subproblem is `modulus`-strongly convex, so |x* − z| ≤ dist(0, H(z)) / modulus.
    const double radius = hz.dist_to_zero() / modulus * (1.0 + 1e-9) + 1e-300;
    double a = hz.lo > 0.0 ? zc - radius : zc;
    double b = hz.lo > 0.0 ? zc : zc + radius;

    for (double bp : ss.breakpoints) {
        if (!(bp > a && bp < b)) continue;
        ++iters;
        const Interval h = subproblem_interval(p, bp, zc, c);
        if (try_point(bp, h)) return result(bp, h);
        if (h.contains_zero()) tracker.exhausted("inner_solve_scalar");
        if (h.lo > 0.0) {
            b = bp;
        } else {
            a = bp;
        }
    }

    while (iters < max_inner_iterations) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;  // floating-point resolution reached
        ++iters;
        const Interval h = subproblem_interval(p, mid, zc, c);
        if (try_point(mid, h)) return result(mid, h);
        if (h.contains_zero()) break;
        if (h.lo > 0.0) {
            b = mid;
        } else {
            a = mid;
        }
    }
    tracker.exhausted("inner_solve_scalar");
}

ProxResult prox_until(const ProblemSpec& p, const Vector& z, double c,
                      std::size_t max_inner_iterations, const StopRule& stop) {
    validate_step(p, c);
    if (static_cast<std::size_t>(z.size()) != p.dimension) throw BadShape("prox: wrong dimension");
    return std::visit(
        [&](const auto& s) -> ProxResult {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CompositeStructure>) {
                return inner_solve_composite(s, z, c, max_inner_iterations, stop);
            } else if constexpr (std::is_same_v<T, HingeStructure>) {
                return inner_solve_svm_dual(s, z, c, max_inner_iterations, stop);
            } else if constexpr (std::is_same_v<T, ScalarStructure>) {
                return inner_solve_scalar(p, s, z, c, max_inner_iterations, stop);
            } else {
                if (!p.has_closed_form_prox()) {
                    throw NotAvailable("prox: no inner solver or closed form for " + p.name);
                }
                const Vector x = p.prox_closed_form(z, c);
                auto [v, n] = residual_certificate(p, x, z, c);
                if (!stop(x, n)) {
                    BestTracker t;
                    t.offer(x, v, n, 0);
                    t.exhausted("closed-form prox");
                }
                ProxResult r = accept(x, std::move(v), n, 0);
                r.exact = true;
                return r;
            }
        },
        p.structure);
}

ProxResult prox(const ProblemSpec& p, const Vector& z, double c, const InnerTolerance& tol) {
    validate_step(p, c);
    if (static_cast<std::size_t>(z.size()) != p.dimension) throw BadShape("prox: wrong dimension");
    if (p.has_closed_form_prox()) {
        ProxResult r;
        r.point = p.prox_closed_form(z, c);
        auto [v, n] = residual_certificate(p, r.point, z, c);
        r.residual_element = std::move(v);
        r.residual_norm = n;
        r.exact = n <= 1e-12;
        return r;
    }
    const double target = tol.target_residual;
    return prox_until(p, z, c, tol.max_inner_iterations,
                      [target](const Vector&, double rn) { return rn <= target; });
}

}  // namespace proxreg
