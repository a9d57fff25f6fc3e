#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>
#include <cmath>

#include "proxreg/ppm.hpp"

namespace proxreg {

/// A and B compare against the true prox and need test mode. AB enforces both.
/// A′ and B′ use the residual certificate.
enum class CriterionKind { A, B, AB, Aprime, Bprime };

std::string to_string(CriterionKind k);
CriterionKind parse_criterion_kind(const std::string& s);

/// ε_k = ε₀γᵏ and δ_k = δ₀γᵏ.
struct InexactCriterion {
    CriterionKind kind = CriterionKind::Aprime;
    double eps0 = 0.1;
    double delta0 = 0.5;
    double gamma = 0.7;

    bool uses_eps() const;
    bool uses_delta() const;
    bool needs_reference() const;
    /// True when every active tolerance is zero, so each step is an exact prox.
    bool is_exact() const;
    double eps(std::size_t k) const { return eps0 * std::pow(gamma, static_cast<double>(k)); }
    double delta(std::size_t k) const { return delta0 * std::pow(gamma, static_cast<double>(k)); }
    /// Throws ConfigError on negative tolerances or γ outside (0,1).
    void validate() const;
};

struct IppmOptions {
    PpmOptions ppm;
    bool test_mode = false;
    InnerTolerance reference_tol{1e-12, 200000};
};

/// x_{k+1} ≈ prox_{c_k,f}(x_k) under the chosen criterion. In test mode every
/// step also logs dist(prox, S) and ‖x_{k+1} − prox‖ against a tight reference prox.
/// Throws CriterionUnverifiable for A/B/AB without test mode.
IterationTrace run_ippm(const ProblemSpec& p, const Vector& x0, const StepSchedule& sched,
                        const InexactCriterion& crit, const IppmOptions& opts = {});

/// min_{j≤k} f(x_j) − f* ≤ (dist²(x₀,S) + 2D Σ_{j<k} ε_j) / (2 Σ_{j<k} c_j).
/// D is the running diameter of the iterates, widened by ‖x_j − x*‖ when x_star
/// is given and by dist(x₀,S) otherwise. Needs f* and ε on the trace; dist0 defaults to the logged dist_S.
CheckReport check_ippm_sublinear(const IterationTrace& trace,
                                 std::optional<double> dist0 = std::nullopt,
                                 const std::optional<Vector>& x_star = std::nullopt);

struct IppmLinearReport {
    CheckReport distance;             ///< dist(x_{k+1},S) ≤ θ̂_k dist(x_k,S) for k ≥ k̄
    std::optional<std::size_t> k_bar;
    std::vector<double> theta_hat;    ///< θ̂_k for each checked step, aligned with distance.steps

    bool passed() const { return distance.passed(); }
};

/// θ̂ = (θ + 2δ)/(1 − δ).
double inexact_theta(double theta, double delta);

/// k̄ = max(first k with f(x_k) ≤ f* + ν, first k with δ_k < 1). Steps without
/// a logged δ use δ = 0.
IppmLinearReport check_ippm_linear(const IterationTrace& trace,
                                   const RegularityConstants& constants, double nu);

/// (1 − δ_k) dist(x_{k+1},S) ≤ 2δ_k dist(x_k,S) + dist(prox_{c_k,f}(x_k),S) + 1e-9.
/// Throws NotAvailable unless the trace came from a test-mode run with δ logged.
CheckReport check_inexact_one_step(const IterationTrace& trace);

struct AveragedIterate {
    std::size_t k = 0;
    Vector x_bar;          ///< (1/k) Σ_{j=1..k} x_j
    Vector x_tilde;        ///< Σ_{j<k} c_j x_{j+1} / Σ_{j<k} c_j
    double gap_bar = 0.0;
    double gap_tilde = 0.0;
    double bound_bar = 0.0;    ///< (1/k) Σ_{j=1..k} (f(x_j) − f*)
    double bound_tilde = 0.0;  ///< Σ c_j (f(x_{j+1}) − f*) / Σ c_j
};

/// One entry per k = 1..iterations. Needs f* on p.
std::vector<AveragedIterate> averaged_iterates(const ProblemSpec& p, const IterationTrace& trace);

}  // namespace proxreg
