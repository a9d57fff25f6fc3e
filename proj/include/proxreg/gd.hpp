#pragma once

#include <cstddef>
#include <optional>

#include "proxreg/ppm.hpp"

namespace proxreg {

/// L: gradient Lipschitz constant, mu: RSI constant, beta: PL constant.
struct GDParams {
    double L = 1.0;
    double mu = 1.0;
    double beta = 1.0;
    std::optional<double> step;  ///< defaults to μ/L²

    double t() const { return step.value_or(mu / (L * L)); }
    /// Throws ConfigError unless 0 < μ ≤ L, 0 < β ≤ L³/(2μL − μ²) and t > 0.
    /// A step outside (0, 2/L) is allowed here and flagged by verify_gd_rates.
    void validate() const;
    /// √(1 − μ²/L²)
    double omega1() const;
    /// (L³ − 2μLβ + μ²β) / L³
    double omega2() const;
};

/// Params from the benchmark metadata (smoothness, gd_rsi, gd_pl); throws
/// NotAvailable when any is missing.
GDParams gd_params_from(const ProblemSpec& p);

/// x_{k+1} = x_k − t ∇f(x_k). Record k stores t in `c` and ‖∇f(x_k)‖ in
/// `residual_norm`. Stops early only at an exact zero gradient.
/// Throws NotSmooth when p has no smoothness constant.
IterationTrace run_gd(const ProblemSpec& p, const Vector& x0, const GDParams& params,
                      std::size_t iters);

struct GdRateReport {
    bool precondition_ok = true;  ///< t ∈ (0, 2/L) and t = μ/L²
    double omega1 = 1.0;          ///< rate for the step actually used
    double omega2 = 1.0;
    CheckReport distance;  ///< dist(x_{k+1},S) ≤ ω₁ dist(x_k,S)
    CheckReport cost;      ///< gap_{k+1} ≤ ω₂ gap_k
    CheckReport descent;   ///< f_{k+1} − f_k ≤ ((−2t + Lt²)/2)‖∇f(x_k)‖²
    CheckReport chain;     ///< dist²_{k+1} ≤ (1 − 2tμ + t²L²) dist²_k

    bool bounds_hold() const;
    /// bounds_hold() together with the precondition.
    bool passed() const { return precondition_ok && bounds_hold(); }
};

/// Ratio checks skip steps whose denominator is below 1e-14.
GdRateReport verify_gd_rates(const IterationTrace& trace, const GDParams& params);

}  // namespace proxreg
