#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "proxreg/errors.hpp"

namespace proxreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultTolerance = 1e-9;

/// Value in R ∪ {+inf}. Never uses a sentinel float for the infinite case.
class ExtendedReal {
public:
    static ExtendedReal finite(double v) { return ExtendedReal(v, true); }
    static ExtendedReal infinity() { return ExtendedReal(0.0, false); }

    bool is_finite() const noexcept { return finite_; }

    /// Throws DomainError when the value is +inf.
    double value() const {
        if (!finite_) throw DomainError("value is +inf (point outside dom f)");
        return value_;
    }

    bool operator<=(const ExtendedReal& other) const noexcept {
        if (!other.finite_) return true;
        if (!finite_) return false;
        return value_ <= other.value_;
    }

private:
    ExtendedReal(double v, bool f) : value_(v), finite_(f) {}
    double value_;
    bool finite_;
};

/// Axis-aligned box [lower, upper]. Used when a subdifferential is exactly a box,
/// which covers smooth functions (lower == upper), separable l1 terms and
/// piecewise 1D functions at their breakpoints.
struct Box {
    Vector lower;
    Vector upper;

    bool contains(const Vector& v, double tol = 0.0) const;
    /// Element of the box closest to -shift, i.e. argmin_{b in box} ||b + shift||.
    Vector closest_to_negative(const Vector& shift) const;
};

/// What the subgradient oracle knows about ∂̂f(x).
struct Subdifferential {
    Vector element;             ///< some element of ∂̂f(x)
    std::optional<Box> exact;   ///< ∂̂f(x) itself, when it is a box

    static Subdifferential gradient(Vector g) {
        Subdifferential s;
        s.element = g;
        s.exact = Box{g, g};
        return s;
    }
};

struct SolutionInfo {
    Vector projection;  ///< Π_S(x)
    double distance;    ///< dist(x, S)
};

using ValueOracle = std::function<ExtendedReal(const Vector&)>;
using SubgradientOracle = std::function<Subdifferential(const Vector&)>;
using SolutionOracle = std::function<SolutionInfo(const Vector&)>;
using ProxOracle = std::function<Vector(const Vector& center, double step)>;

/// f(x) = ½‖y − Ax‖² + l1‖x‖₁ + (l2/2)‖x‖². Covers lasso, elastic-net and quadratics.
struct CompositeStructure {
    Matrix A;
    Vector y;
    double l1 = 0.0;
    double l2 = 0.0;
    double smooth_lipschitz = 0.0;  ///< largest squared singular value of A
};

/// f(x) = (1/n) Σ max{0, 1 − b_i a_iᵀx} + (reg/2)‖x‖².
struct HingeStructure {
    Matrix features;  ///< n × d, one sample per row
    Vector labels;    ///< entries in {−1, +1}
    double reg = 1.0;
};

/// One-dimensional function whose subdifferential is an interval everywhere,
/// smooth between the listed breakpoints.
struct ScalarStructure {
    std::vector<double> breakpoints;
};

using InnerStructure =
    std::variant<std::monostate, CompositeStructure, HingeStructure, ScalarStructure>;

/// Regularity constants (SC, RSI, EB, PL, QG). Zero means "fails" for the
/// infimum-type constants, +inf means "fails" for μ_e.
struct RegularityConstants {
    double mu_s = 0.0;
    double mu_r = 0.0;
    double mu_e = std::numeric_limits<double>::infinity();
    double mu_p = 0.0;
    double mu_q = 0.0;
};

/// Constants known in closed form for a benchmark, attached for tests.
struct KnownConstants {
    std::optional<RegularityConstants> sharp;  ///< sharp values over the default sublevel set
    double default_nu = std::numeric_limits<double>::infinity();
    double bracket_lo = -1.0;  ///< grid bracket documented for 1D benchmarks
    double bracket_hi = 1.0;
    bool qg_global = false;
    bool pl_eb_fail_globally = false;
    std::optional<double> gd_rsi;  ///< smooth RSI constant μ of ⟨∇f(x), x − Π_S(x)⟩ ≥ μ dist²
    std::optional<double> gd_pl;   ///< smooth PL constant β of ½‖∇f‖² ≥ β (f − f*)
};

/// Oracle bundle describing min f(x). Immutable once built; share by const reference.
struct ProblemSpec {
    std::string name;
    std::size_t dimension = 0;
    ValueOracle value;
    SubgradientOracle subgradient;
    double weak_convexity = 0.0;            ///< ρ; 0 means convex
    std::optional<double> smoothness;       ///< L of ∇f
    std::optional<double> strong_convexity; ///< recorded for reference solves
    std::optional<double> optimum_value;    ///< f*
    SolutionOracle solution;                ///< empty when unavailable
    ProxOracle prox_closed_form;            ///< empty when unavailable
    InnerStructure structure;
    KnownConstants known;
    std::optional<double> reference_residual;  ///< set by reference_solution

    bool has_solution_oracle() const { return static_cast<bool>(solution); }
    bool has_closed_form_prox() const { return static_cast<bool>(prox_closed_form); }

    /// f(x) as a finite double; DomainError outside dom f.
    double eval(const Vector& x) const;
};

struct MinNormSubgradient {
    Vector vector;
    double norm = 0.0;
    bool approximate = false;
};

/// Minimum-norm element of ∂̂f(x). With require_exact, throws NotAvailable when
/// the oracle only returns a generic element.
MinNormSubgradient min_norm_subgradient(const ProblemSpec& p, const Vector& x,
                                        bool require_exact = false);

double distance_to_solution(const ProblemSpec& p, const Vector& x);

/// f(y) ≥ f(x) + ⟨v, y − x⟩ − (ρ/2)‖y − x‖² − tol for v from the oracle at x.
bool subgradient_inequality_holds(const ProblemSpec& p, const Vector& x, const Vector& y,
                                  double tol = kDefaultTolerance);

/// f(λx + (1−λ)y) ≤ λf(x) + (1−λ)f(y) + ρλ(1−λ)‖x − y‖²/2 + tol.
bool secant_inequality_holds(const ProblemSpec& p, const Vector& x, const Vector& y,
                             double lambda, double rho, double tol = kDefaultTolerance);

inline Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace proxreg
