#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "proxreg/problem.hpp"

namespace proxreg {

// ---------------------------------------------------------------------------
// Benchmark functions
// ---------------------------------------------------------------------------

enum class BenchmarkId {
    quad1d,        ///< f(x) = x²
    quad_quartic,  ///< x² on |x| ≤ 1, ½x⁴ + ½ outside
    sine_quad,     ///< x² + 6 sin²(x)
    wc_piecewise,  ///< −x² + 1 on (−1, −0.5), 3(x + 1)² elsewhere; 2-weakly convex
    aniso_quad,    ///< ½(x₁² + L x₂²)
};

std::string_view to_string(BenchmarkId id);
/// Throws ConfigError for an unknown name.
BenchmarkId parse_benchmark_id(std::string_view name);

/// Builds the benchmark with exact f*, solution oracle, ρ, structure for the
/// inner solvers and the known constants. `aniso_L` only affects aniso_quad.
ProblemSpec make_benchmark(BenchmarkId id, double aniso_L = 9.0);

// ---------------------------------------------------------------------------
// Machine-learning problems
// ---------------------------------------------------------------------------

struct Dataset {
    Matrix features;  ///< n × d
    Vector labels;    ///< length n
    std::string source;

    std::size_t samples() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t dimension() const { return static_cast<std::size_t>(features.cols()); }
};

struct LassoData {
    Matrix A;      ///< n × m
    Vector y;      ///< length n, y = A x̂
    Vector x_hat;  ///< length m with exactly s zeros
};

enum class MLKind { svm, lasso, elastic_net };

std::string_view to_string(MLKind kind);
MLKind parse_ml_kind(std::string_view name);

struct MLProblemParams {
    MLKind kind = MLKind::lasso;
    double svm_reg = 1.0;  ///< ρ of the SVM regularizer
    double lambda = 10.0;  ///< l1 weight
    double mu_en = 1.0;    ///< elastic-net quadratic weight

    /// A quadratic regularizer is present (svm, elastic-net).
    bool strongly_convex() const { return kind != MLKind::lasso; }
};

/// A ~ N(0,1) i.i.d., x̂ ~ N(0,1) with exactly s zeros at random positions, y = A x̂.
/// Throws BadShape if s ≥ m.
LassoData generate_lasso_data(std::size_t n, std::size_t m, std::size_t s, std::uint64_t seed);

/// Two Gaussian blobs with labels ±1 and class means ±separation·(1,…,1)/√d.
Dataset generate_svm_blobs(std::size_t n, std::size_t d, std::uint64_t seed,
                           double separation = 1.0);

/// SVM problem from a dataset (params.kind must be svm).
ProblemSpec make_ml_problem(const MLProblemParams& params, const Dataset& data);
/// Lasso or elastic-net problem (params.kind must be lasso or elastic_net).
ProblemSpec make_ml_problem(const MLProblemParams& params, const Matrix& A, const Vector& y);

/// Composite problem ½‖y − Ax‖² + l1‖x‖₁ + (l2/2)‖x‖² with its exact (box) subdifferential.
ProblemSpec make_composite_problem(std::string name, const Matrix& A, const Vector& y,
                                   double l1, double l2);

/// LIBSVM sparse text: `label idx:val ...` with 1-based indices. Label 1 maps
/// to +1, labels −1 and 0 map to −1, anything else is a ParseError. The dimension is inferred
/// from the largest index unless `dimension` is given.
Dataset load_libsvm(const std::string& path, std::optional<std::size_t> dimension = {});
Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> dimension = {},
                     std::string source = "<memory>");

/// Largest eigenvalue of AᵀA by power iteration (relative tolerance 1e-10).
double largest_squared_singular_value(const Matrix& A);

}  // namespace proxreg
