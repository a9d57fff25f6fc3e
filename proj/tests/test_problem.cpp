#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "proxreg/zoo.hpp"

using namespace proxreg;

TEST_CASE("extended reals refuse to expose +inf as a double") {
    CHECK(ExtendedReal::finite(2.5).value() == 2.5);
    CHECK_FALSE(ExtendedReal::infinity().is_finite());
    CHECK_THROWS_AS(ExtendedReal::infinity().value(), DomainError);
    CHECK(ExtendedReal::finite(1.0) <= ExtendedReal::infinity());
    CHECK_FALSE(ExtendedReal::infinity() <= ExtendedReal::finite(1e300));
}

TEST_CASE("box clamps toward the negated shift") {
    Box b{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
    const Vector shift = (Vector(2) << 3.0, -0.25).finished();
    const Vector v = b.closest_to_negative(shift);
    CHECK(v[0] == -1.0);
    CHECK(v[1] == 0.25);
    CHECK(b.contains(v));
    CHECK_FALSE(b.contains(Vector::Constant(2, 1.5)));
}

TEST_CASE("min-norm subgradient on smooth and piecewise benchmarks") {
    const ProblemSpec q = make_benchmark(BenchmarkId::quad1d);
    CHECK(min_norm_subgradient(q, scalar(2.0)).norm == doctest::Approx(4.0));

    const ProblemSpec w = make_benchmark(BenchmarkId::wc_piecewise);
    // ∂̂f(−0.5) = [1, 3]
    const auto at_kink = min_norm_subgradient(w, scalar(-0.5), true);
    CHECK(at_kink.norm == doctest::Approx(1.0));
    CHECK_FALSE(at_kink.approximate);
    CHECK(min_norm_subgradient(w, scalar(-1.0)).norm == 0.0);
}

TEST_CASE("min-norm subgradient is approximate for the SVM") {
    MLProblemParams params;
    params.kind = MLKind::svm;
    const ProblemSpec p = make_ml_problem(params, generate_svm_blobs(40, 3, 1));
    const auto mn = min_norm_subgradient(p, Vector::Zero(3));
    CHECK(mn.approximate);
    CHECK_THROWS_AS(min_norm_subgradient(p, Vector::Zero(3), true), NotAvailable);
}

TEST_CASE("min-norm subgradient vanishes on the solution set") {
    for (BenchmarkId id : {BenchmarkId::quad1d, BenchmarkId::quad_quartic, BenchmarkId::sine_quad,
                           BenchmarkId::wc_piecewise, BenchmarkId::aniso_quad}) {
        const ProblemSpec p = make_benchmark(id);
        const Vector x = Vector::Constant(static_cast<Eigen::Index>(p.dimension), 0.7);
        const Vector star = p.solution(x).projection;
        CAPTURE(p.name);
        CHECK(min_norm_subgradient(p, star).norm == 0.0);
        CHECK(distance_to_solution(p, star) == 0.0);
    }
}

TEST_CASE("distance needs a solution oracle") {
    MLProblemParams params;
    params.kind = MLKind::lasso;
    const LassoData d = generate_lasso_data(5, 8, 2, 3);
    const ProblemSpec p = make_ml_problem(params, d.A, d.y);
    CHECK_THROWS_AS(distance_to_solution(p, Vector::Zero(8)), NotAvailable);
}

TEST_CASE("subgradient inequality with the weak convexity correction") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.5, 0.5);
    const ProblemSpec w = make_benchmark(BenchmarkId::wc_piecewise);
    const ProblemSpec q = make_benchmark(BenchmarkId::quad_quartic);
    for (int i = 0; i < 500; ++i) {
        const Vector x = scalar(u(rng));
        const Vector y = scalar(u(rng));
        CHECK(subgradient_inequality_holds(w, x, y));
        CHECK(subgradient_inequality_holds(q, x, y));
    }
    // dropping ρ breaks the inequality inside the concave piece
    ProblemSpec convexified = w;
    convexified.weak_convexity = 0.0;
    CHECK_FALSE(subgradient_inequality_holds(convexified, scalar(-0.9), scalar(-0.6)));
}

TEST_CASE("secant inequality") {
    const ProblemSpec w = make_benchmark(BenchmarkId::wc_piecewise);
    CHECK(secant_inequality_holds(w, scalar(-0.95), scalar(-0.55), 0.5, 2.0));
    CHECK_FALSE(secant_inequality_holds(w, scalar(-0.95), scalar(-0.55), 0.5, 0.0));
}

TEST_CASE("eval rejects points outside the domain") {
    ProblemSpec p = make_benchmark(BenchmarkId::quad1d);
    p.value = [](const Vector& x) {
        return x[0] < 0 ? ExtendedReal::infinity() : ExtendedReal::finite(x[0]);
    };
    CHECK(p.eval(scalar(1.0)) == 1.0);
    CHECK_THROWS_AS(p.eval(scalar(-1.0)), DomainError);
}
