#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "proxreg/problem.hpp"
#include "proxreg/prox.hpp"
#include "proxreg/trace.hpp"

namespace proxreg {

/// Step sizes {c_k}. A sequence shorter than the horizon repeats its last value.
class StepSchedule {
public:
    enum class Kind { constant, sequence, geometric };

    static StepSchedule constant(double c);
    static StepSchedule sequence(std::vector<double> values);
    static StepSchedule geometric(double c0, double growth);

    Kind kind() const noexcept { return kind_; }
    double at(std::size_t k) const;
    /// min_{k < horizon} c_k.
    double min_over(std::size_t horizon) const;
    /// Throws StepTooLarge if some c_k ≤ 0 or 1/c_k ≤ ρ for k < horizon.
    void validate(double rho, std::size_t horizon) const;

private:
    Kind kind_ = Kind::constant;
    std::vector<double> values_;
    double growth_ = 1.0;
};

struct PpmOptions {
    std::size_t max_iter = 500;
    InnerTolerance inner{1e-12, 10000};
    double stop_gap = 1e-10;       ///< stop once f(x_k) − f* ≤ stop_gap (needs f*)
    double stop_residual = 1e-10;  ///< stop once ‖x_{k+1} − x_k‖ / c_k ≤ stop_residual
    std::optional<double> nu;      ///< sublevel level used to record k₀
};

/// Exact proximal point method x_{k+1} = prox_{c_k,f}(x_k), convex or ρ-weakly
/// convex (with 1/c_k > ρ).
IterationTrace run_ppm(const ProblemSpec& p, const Vector& x0, const StepSchedule& sched,
                       const PpmOptions& opts = {});

/// Linear-rate constants for one step c_k.
struct RateBounds {
    double omega = 1.0;     ///< 2 / (2 + μ_p c)
    double theta_qg = 1.0;  ///< 1 / √(2cβ + 1), β = μ_q − ρ/2
    double theta_eb = 1.0;  ///< 1 / √(c²/μ_e² + 1)
    double theta = 1.0;     ///< min(theta_qg, theta_eb)
    double beta = 0.0;
};

RateBounds rate_bounds(double c, const RegularityConstants& constants, double rho = 0.0);

struct StepCheck {
    std::size_t k = 0;
    bool ok = true;
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Per-step outcomes of a bound check; skipped steps are absent.
struct CheckReport {
    std::vector<StepCheck> steps;

    bool passed() const;
    std::optional<std::size_t> first_violation() const;
};

/// f(x_k) − f* ≤ dist²(x₀,S) / (2 Σ_{t<k} c_t) at every k ≥ 1, with tolerance
/// 1e-9 plus the slack contributed by inexact inner solves.
CheckReport check_sublinear_bound(const IterationTrace& trace, double dist0);

/// 2c_k (f(x_{k+1}) − f(x*)) ≤ ‖x_k − x*‖² − ‖x_{k+1} − x*‖² at each step.
CheckReport check_one_step(const IterationTrace& trace, const Vector& x_star);

struct LinearRateReport {
    CheckReport cost;      ///< f(x_{k+1}) − f* ≤ ω_k (f(x_k) − f*)
    CheckReport distance;  ///< dist(x_{k+1},S) ≤ θ_k dist(x_k,S)
    std::optional<std::size_t> k0;

    bool passed() const { return cost.passed() && distance.passed(); }
};

/// Checks both contractions for k ≥ k₀ (first k with f(x_k) ≤ f* + ν). Uses
/// β = μ_q − ρ/2 for weakly convex traces.
LinearRateReport check_linear_rates(const IterationTrace& trace,
                                    const RegularityConstants& constants, double nu);

struct ReferenceOptions {
    double step = 1.0;
    std::optional<Vector> x0;  ///< defaults to the origin
};

/// Runs a long, tight exact PPM and returns a copy of p with f* installed and,
/// for strongly convex p, the solution oracle "distance to the reference point".
ProblemSpec reference_solution(const ProblemSpec& p, std::size_t effort,
                               const ReferenceOptions& opts = {});

}  // namespace proxreg
