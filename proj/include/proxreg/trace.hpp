#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxreg/problem.hpp"

namespace proxreg {

/// State at iterate k and the step taken from it (step fields are empty on the
/// final record).
struct IterationRecord {
    std::size_t k = 0;
    Vector x;
    double f = 0.0;
    std::optional<double> cost_gap;  ///< f(x_k) − f*
    std::optional<double> dist_S;    ///< dist(x_k, S)
    double diameter = 0.0;           ///< max pairwise distance over x_0..x_k

    std::optional<double> c;              ///< step c_k (or t_k for gradient descent)
    std::optional<double> residual_norm;  ///< certificate norm of the step's subproblem
    std::optional<double> eps;            ///< ε_k
    std::optional<double> delta;          ///< δ_k
    std::optional<bool> criterion_ok;
    std::size_t inner_iterations = 0;

    // Test mode only: comparison with a tight reference prox_{c_k,f}(x_k).
    std::optional<double> ref_prox_dist;   ///< dist(prox_{c_k,f}(x_k), S)
    std::optional<double> ref_prox_error;  ///< ‖x_{k+1} − prox_{c_k,f}(x_k)‖
};

struct IterationTrace {
    std::string solver;
    std::string problem;
    std::vector<IterationRecord> records;
    std::optional<double> optimum_value;
    double weak_convexity = 0.0;
    std::optional<double> nu;
    std::optional<std::size_t> k0_empirical;  ///< first k with f(x_k) ≤ f* + ν
    std::optional<double> k0_apriori;         ///< dist²(x₀,S) / (2ν min c_k)
    std::string stop_reason;

    std::size_t iterations() const { return records.empty() ? 0 : records.size() - 1; }
    const Vector& x0() const { return records.front().x; }
    double diameter() const { return records.empty() ? 0.0 : records.back().diameter; }
};

/// Builds the record for x, filling gap/dist from the problem's oracles and the
/// running diameter from the previous records.
IterationRecord make_record(const ProblemSpec& p, const std::vector<IterationRecord>& previous,
                            const Vector& x);

/// Sets nu, k0_empirical and k0_apriori (the latter needs dist(x₀,S)).
void annotate_sublevel_entry(IterationTrace& trace, double nu);

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr std::string_view kTraceCsvHeader =
    "k,c_k,f,cost_gap,dist_S,residual_norm,eps_k,delta_k,criterion_ok";

struct TraceCsvRow {
    std::size_t k = 0;
    std::optional<double> c;
    double f = 0.0;
    std::optional<double> cost_gap;
    std::optional<double> dist_S;
    std::optional<double> residual_norm;
    std::optional<double> eps;
    std::optional<double> delta;
    std::optional<bool> criterion_ok;
};

std::vector<TraceCsvRow> trace_rows(const IterationTrace& trace);
void write_trace_csv(const IterationTrace& trace, std::ostream& out);
void emit_trace_csv(const IterationTrace& trace, const std::string& path);
/// Inverse of write_trace_csv; throws ParseError on malformed input.
std::vector<TraceCsvRow> parse_trace_csv(std::string_view text);

std::string format_double(double v);

}  // namespace proxreg
