#include "proxreg/problem.hpp"

#include <algorithm>

namespace proxreg {

bool Box::contains(const Vector& v, double tol) const {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] < lower[i] - tol || v[i] > upper[i] + tol) return false;
    }
    return true;
}

Vector Box::closest_to_negative(const Vector& shift) const {
    Vector b(lower.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        b[i] = std::clamp(-shift[i], lower[i], upper[i]);
    }
    return b;
}

double ProblemSpec::eval(const Vector& x) const {
    return value(x).value();
}

MinNormSubgradient min_norm_subgradient(const ProblemSpec& p, const Vector& x,
                                        bool require_exact) {
    if (!p.value(x).is_finite()) {
        throw DomainError("min_norm_subgradient: x outside dom f");
    }
    Subdifferential sd = p.subgradient(x);
    MinNormSubgradient out;
    if (sd.exact) {
        out.vector = sd.exact->closest_to_negative(Vector::Zero(x.size()));
        out.approximate = false;
    } else {
        if (require_exact) {
            throw NotAvailable("min_norm_subgradient: only a generic subgradient is available for " +
                               p.name);
        }
        out.vector = sd.element;
        out.approximate = true;
    }
    out.norm = out.vector.norm();
    return out;
}

double distance_to_solution(const ProblemSpec& p, const Vector& x) {
    if (!p.has_solution_oracle()) {
        throw NotAvailable("distance_to_solution: no solution oracle for " + p.name);
    }
    return p.solution(x).distance;
}

bool subgradient_inequality_holds(const ProblemSpec& p, const Vector& x, const Vector& y,
                                  double tol) {
    const double fx = p.eval(x);
    const ExtendedReal fy = p.value(y);
    if (!fy.is_finite()) return true;
    const Vector v = p.subgradient(x).element;
    const Vector d = y - x;
    return fy.value() >= fx + v.dot(d) - 0.5 * p.weak_convexity * d.squaredNorm() - tol;
}

bool secant_inequality_holds(const ProblemSpec& p, const Vector& x, const Vector& y,
                             double lambda, double rho, double tol) {
    const ExtendedReal fx = p.value(x);
    const ExtendedReal fy = p.value(y);
    if (!fx.is_finite() || !fy.is_finite()) return true;
    const Vector mid = lambda * x + (1.0 - lambda) * y;
    const ExtendedReal fm = p.value(mid);
    if (!fm.is_finite()) return false;
    const double rhs = lambda * fx.value() + (1.0 - lambda) * fy.value() +
                       0.5 * rho * lambda * (1.0 - lambda) * (x - y).squaredNorm();
    return fm.value() <= rhs + tol;
}

}  // namespace proxreg
