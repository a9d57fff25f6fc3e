#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxreg/problem.hpp"

namespace proxreg {

/// Where and how densely the sublevel set [f ≤ f* + ν] is sampled.
struct EstimationPlan {
    enum class Sampling { grid, random };

    double nu = std::numeric_limits<double>::infinity();
    Sampling sampling = Sampling::grid;
    double lo = -1.0;  ///< grid bracket, every coordinate
    double hi = 1.0;
    std::size_t count = 10001;
    double radius = 1.0;  ///< random sampling: uniform cube of this half-width around center
    std::optional<Vector> center;
    std::uint64_t seed = 0;
    double tau_S = 1e-9;
    std::size_t sc_max_points = 200;

    static EstimationPlan grid(double lo, double hi, std::size_t count,
                               double nu = std::numeric_limits<double>::infinity());
    static EstimationPlan random(std::size_t count, double radius, std::uint64_t seed,
                                 double nu = std::numeric_limits<double>::infinity());
    /// Throws ConfigError when count < 100, lo ≥ hi or ν ≤ 0.
    void validate(std::size_t dimension) const;
};

/// Sample points of the plan, before sublevel filtering. Grids are used up to
/// dimension 2 (count points per axis in 1D, ⌈√count⌉ per axis in 2D).
std::vector<Vector> sample_points(const EstimationPlan& plan, std::size_t dimension);

struct ConstantEstimate {
    double value = 0.0;
    std::optional<Vector> witness;
    /// "sampled" (extremal ratio over samples), "upper_bound" or "lower_bound" when
    /// subgradient norms are over-estimates, "approximate" otherwise.
    std::string bound_direction = "sampled";
    bool clamped = false;  ///< a negative raw infimum was reported as 0
};

struct RegularityReport {
    std::string problem;
    double nu = std::numeric_limits<double>::infinity();
    ConstantEstimate mu_s;
    ConstantEstimate mu_r;
    ConstantEstimate mu_e;
    ConstantEstimate mu_p;
    ConstantEstimate mu_q;
    bool pl_fails_globally = false;
    bool eb_fails_globally = false;
    std::vector<Vector> stationary_points;  ///< suboptimal stationary points inside the level set
    std::size_t samples_admitted = 0;

    RegularityConstants constants() const;
};

/// Extremal empirical ratios of the five conditions over the admitted samples.
/// Throws NeedsReference without f* or a solution oracle.
RegularityReport estimate_constants(const ProblemSpec& p, const EstimationPlan& plan);

nlohmann::json to_json(const RegularityReport& r);

enum class RelationStatus { pass, fail, premise_fails, not_triggered };
std::string to_string(RelationStatus s);

struct RelationCheck {
    int id = 0;
    std::string relation;
    double expected = 0.0;  ///< the bound implied by the other constants
    double observed = 0.0;  ///< the estimated constant being bounded
    RelationStatus status = RelationStatus::pass;

    bool ok() const { return status != RelationStatus::fail; }
};

inline constexpr double kAuditTolerance = 0.10;

/// The six constant relations, each with a 10% sampling tolerance:
/// (1) μ_r ≥ μ_s  (2) μ_e ≤ 1/μ_r  (3) μ_p ≥ 2/(2μ_e + ρμ_e²)  (4) μ_e ≤ 2/μ_p
/// (5) μ_q ≥ 1/(4μ_e)  (6) μ_r ≥ μ_q − ρ/2 when ρ = 0 or μ_q > ρ/2.
std::vector<RelationCheck> audit_implications(const RegularityConstants& k, double rho);

nlohmann::json to_json(const std::vector<RelationCheck>& audit);

struct StationaryPoint {
    double x = 0.0;
    double gap = 0.0;
    std::string kind;  ///< "local_min", "local_max" or "saddle"
};

/// 1D only: sign-change bisection on the min-norm subgradient over [lo, hi];
/// keeps points with |g| < 1e-8 and f − f* > 1e-6.
std::vector<StationaryPoint> find_suboptimal_stationary_points(const ProblemSpec& p, double lo,
                                                               double hi,
                                                               std::size_t scan_points = 20001);

struct WeakConvexityCheck {
    bool holds = true;
    std::optional<Vector> x;
    std::optional<Vector> y;
    double lambda = 0.0;
    double violation = 0.0;
};

/// Secant inequality on seeded triples (x, y, λ) drawn from [lo, hi]^d.
WeakConvexityCheck verify_weak_convexity(const ProblemSpec& p, double rho, std::size_t samples,
                                         double lo, double hi, std::uint64_t seed = 0);

}  // namespace proxreg
