#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "proxreg/problem.hpp"

namespace proxreg {

/// Output of a proximal step prox_{c,f}(z) with an explicit residual certificate:
/// residual_element ∈ H(x) = ∂f(x) + (x − z)/c, so residual_norm ≥ dist(0, H(x)).
struct ProxResult {
    Vector point;
    Vector residual_element;
    double residual_norm = 0.0;
    std::size_t inner_iterations = 0;
    bool exact = false;
};

struct InnerTolerance {
    double target_residual = 1e-12;
    std::size_t max_inner_iterations = 10000;
};

/// Raised when an inner solver runs out of iterations; carries the best point.
class InnerBudgetExhausted : public Error {
public:
    InnerBudgetExhausted(const std::string& what, ProxResult best)
        : Error(what), best_(std::move(best)) {}
    const ProxResult& best() const noexcept { return best_; }

private:
    ProxResult best_;
};

/// Acceptance test for an inner candidate, given its certified residual.
using StopRule = std::function<bool(const Vector& candidate, double residual_norm)>;

/// prox_{c,f}(z): closed form when available, otherwise the structure's inner
/// solver run until residual_norm ≤ tol.target_residual.
/// Throws StepTooLarge if 1/c ≤ ρ, InnerBudgetExhausted on budget exhaustion.
ProxResult prox(const ProblemSpec& p, const Vector& z, double c, const InnerTolerance& tol);

/// Runs the structure's iterative inner solver (never the closed form) and returns
/// the first candidate accepted by `stop`. The warm start z is checked first.
ProxResult prox_until(const ProblemSpec& p, const Vector& z, double c,
                      std::size_t max_inner_iterations, const StopRule& stop);

/// True when p has an iterative inner solver (composite, hinge or scalar structure).
bool has_inner_solver(const ProblemSpec& p);

/// v + (x − z)/c for a constructed v ∈ ∂f(x). When ∂̂f(x) is an exact box the
/// returned norm equals dist(0, H(x)); otherwise it is an upper bound.
std::pair<Vector, double> residual_certificate(const ProblemSpec& p, const Vector& x,
                                               const Vector& z, double c);

/// Accelerated proximal gradient on ½‖y − Ax‖² + (l2/2)‖x‖² + (1/2c)‖x − z‖² + l1‖x‖₁.
ProxResult inner_solve_composite(const CompositeStructure& cs, const Vector& z, double c,
                                 std::size_t max_inner_iterations, const StopRule& stop);

/// Dual coordinate ascent for the hinge-loss subproblem with α_i ∈ [0, 1/n].
ProxResult inner_solve_svm_dual(const HingeStructure& hs, const Vector& z, double c,
                                std::size_t max_inner_iterations, const StopRule& stop);

/// Safeguarded bisection on the monotone interval map H(x) for 1D problems.
ProxResult inner_solve_scalar(const ProblemSpec& p, const ScalarStructure& ss, const Vector& z,
                              double c, std::size_t max_inner_iterations, const StopRule& stop);

/// sign(v)·max(|v| − t, 0).
inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

/// Throws StepTooLarge unless c > 0 and 1/c > ρ (for ρ > 0).
void validate_step(const ProblemSpec& p, double c);

}  // namespace proxreg
