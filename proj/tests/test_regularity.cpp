#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "proxreg/regularity.hpp"
#include "proxreg/zoo.hpp"

using namespace proxreg;

namespace {

bool within(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

}  // namespace

TEST_CASE("quad1d constants") {
    const RegularityReport r =
        estimate_constants(make_benchmark(BenchmarkId::quad1d), EstimationPlan::grid(-1, 1, 10001, 1.0));
    CHECK(within(r.mu_s.value, 1.0, 0.02));
    CHECK(within(r.mu_r.value, 2.0, 0.02));
    CHECK(within(r.mu_e.value, 0.5, 0.02));
    CHECK(within(r.mu_p.value, 4.0, 0.02));
    CHECK(within(r.mu_q.value, 1.0, 0.02));
    CHECK(r.samples_admitted > 9000);
    CHECK_FALSE(r.pl_fails_globally);
    CHECK(r.stationary_points.empty());
}

TEST_CASE("wc_piecewise constants") {
    const ProblemSpec p = make_benchmark(BenchmarkId::wc_piecewise);
    const RegularityReport r = estimate_constants(p, EstimationPlan::grid(-2, 0, 10001, 1.0));
    CHECK(within(r.mu_q.value, 3.0, 0.02));
    CHECK(within(r.mu_e.value, 0.5, 0.02));
    CHECK(within(r.mu_p.value, 4.0 / 3.0, 0.02));
    CHECK(within(r.mu_r.value, 2.0, 0.02));
    CHECK(r.mu_s.value == 0.0);
    CHECK(r.mu_s.clamped);
}

TEST_CASE("aniso_quad constants on a 2D grid") {
    const ProblemSpec p = make_benchmark(BenchmarkId::aniso_quad);
    const RegularityReport r = estimate_constants(p, EstimationPlan::grid(-1, 1, 40401));
    const RegularityConstants& s = *p.known.sharp;
    CHECK(within(r.mu_s.value, s.mu_s, 0.02));
    CHECK(within(r.mu_r.value, s.mu_r, 0.02));
    CHECK(within(r.mu_e.value, s.mu_e, 0.02));
    CHECK(within(r.mu_p.value, s.mu_p, 0.02));
    CHECK(within(r.mu_q.value, s.mu_q, 0.02));
}

TEST_CASE("estimates are stable under grid refinement") {
    for (BenchmarkId id : {BenchmarkId::quad1d, BenchmarkId::quad_quartic, BenchmarkId::wc_piecewise}) {
        const ProblemSpec p = make_benchmark(id);
        CAPTURE(p.name);
        const double lo = p.known.bracket_lo, hi = p.known.bracket_hi, nu = p.known.default_nu;
        const RegularityConstants a = estimate_constants(p, EstimationPlan::grid(lo, hi, 10001, nu)).constants();
        const RegularityConstants b = estimate_constants(p, EstimationPlan::grid(lo, hi, 20001, nu)).constants();
        CHECK(within(b.mu_r, a.mu_r, 0.02));
        CHECK(within(b.mu_e, a.mu_e, 0.02));
        CHECK(within(b.mu_p, a.mu_p, 0.02));
        CHECK(within(b.mu_q, a.mu_q, 0.02));
        CHECK(std::abs(b.mu_s - a.mu_s) <= 0.02 * std::max(1.0, std::abs(a.mu_s)));
    }
}

TEST_CASE("shrinking the level set can only improve the constants") {
    const ProblemSpec p = make_benchmark(BenchmarkId::quad_quartic);
    RegularityConstants prev;
    bool first = true;
    for (double nu : {0.5, 1.0, 4.0, 8.5}) {
        CAPTURE(nu);
        const RegularityConstants k = estimate_constants(p, EstimationPlan::grid(-2, 2, 10001, nu)).constants();
        if (!first) {
            CHECK(k.mu_r <= prev.mu_r + 1e-12);
            CHECK(k.mu_p <= prev.mu_p + 1e-12);
            CHECK(k.mu_q <= prev.mu_q + 1e-12);
            CHECK(k.mu_e >= prev.mu_e - 1e-12);
        }
        prev = k;
        first = false;
    }
}

TEST_CASE("plan validation and sampling") {
    CHECK_THROWS_AS(EstimationPlan::grid(1, -1, 1000).validate(1), ConfigError);
    CHECK_THROWS_AS(EstimationPlan::grid(-1, 1, 10).validate(1), ConfigError);
    CHECK_THROWS_AS(EstimationPlan::grid(-1, 1, 1000, 0.0).validate(1), ConfigError);
    CHECK(sample_points(EstimationPlan::grid(-1, 1, 101), 1).size() == 101);
    CHECK(sample_points(EstimationPlan::grid(-1, 1, 10000), 2).size() == 10000);
    const auto a = sample_points(EstimationPlan::random(500, 2.0, 7), 3);
    const auto b = sample_points(EstimationPlan::random(500, 2.0, 7), 3);
    REQUIRE(a.size() == 500);
    CHECK(a.front() == b.front());
    CHECK(a.back() == b.back());
    for (const auto& x : a) CHECK(x.cwiseAbs().maxCoeff() <= 2.0);
}

TEST_CASE("estimation needs a reference") {
    const LassoData d = generate_lasso_data(5, 8, 2, 1);
    const ProblemSpec lasso = make_composite_problem("lasso", d.A, d.y, 1.0, 0.0);
    CHECK_THROWS_AS(estimate_constants(lasso, EstimationPlan::random(200, 1.0, 1)), NeedsReference);
}

TEST_CASE("report json") {
    const RegularityReport r =
        estimate_constants(make_benchmark(BenchmarkId::sine_quad), EstimationPlan::grid(-10, 10, 20001));
    const nlohmann::json j = to_json(r);
    for (const char* key : {"problem", "nu", "samples_admitted", "constants", "flags", "stationary_points"}) {
        CHECK(j.contains(key));
    }
    for (const char* key : {"mu_s", "mu_r", "mu_e", "mu_p", "mu_q"}) {
        CAPTURE(key);
        REQUIRE(j["constants"].contains(key));
        CHECK(j["constants"][key].contains("value"));
        CHECK(j["constants"][key].contains("witness"));
        CHECK(j["constants"][key].contains("bound_direction"));
    }
    CHECK(j["flags"]["pl_fails_globally"] == true);
    CHECK(j["flags"]["eb_fails_globally"] == true);
    CHECK_FALSE(j["stationary_points"].empty());
}

TEST_CASE("suboptimal stationary points") {
    CHECK(find_suboptimal_stationary_points(make_benchmark(BenchmarkId::quad1d), -10, 10).empty());
    CHECK(find_suboptimal_stationary_points(make_benchmark(BenchmarkId::wc_piecewise), -3, 3).empty());

    const ProblemSpec s = make_benchmark(BenchmarkId::sine_quad);
    const auto pts = find_suboptimal_stationary_points(s, 1, 3);
    REQUIRE_FALSE(pts.empty());
    // f'(x) = 2x + 6 sin(2x)
    const double root = oracle::bisection([](double x) { return 2.0 * x + 6.0 * std::sin(2.0 * x); }, 2.0, 3.0);
    bool found = false;
    for (const auto& p : pts) {
        CHECK(p.gap > 1e-6);
        if (std::abs(p.x - root) <= 1e-6) {
            found = true;
            CHECK(p.kind == "local_min");
        }
    }
    CHECK(found);
}

TEST_CASE("weak convexity verification") {
    const ProblemSpec w = make_benchmark(BenchmarkId::wc_piecewise);
    CHECK(verify_weak_convexity(w, 2.0, 20000, -3, 3, 1).holds);
    const WeakConvexityCheck bad = verify_weak_convexity(w, 1.0, 20000, -3, 3, 1);
    REQUIRE_FALSE(bad.holds);
    REQUIRE(bad.x);
    REQUIRE(bad.y);
    // the violating segment reaches into the concave piece
    const double mid = bad.lambda * (*bad.x)[0] + (1.0 - bad.lambda) * (*bad.y)[0];
    CHECK(mid > -1.0);
    CHECK(mid < -0.5);
    CHECK(bad.violation > 0.0);

    CHECK(verify_weak_convexity(make_benchmark(BenchmarkId::quad1d), 0.0, 20000, -3, 3, 1).holds);
}

TEST_CASE("audit statuses") {
    const auto convex = audit_implications(RegularityConstants{1.0, 2.0, 0.5, 4.0, 1.0}, 0.0);
    REQUIRE(convex.size() == 6);
    for (const auto& c : convex) {
        CAPTURE(c.id);
        CHECK(c.status == RelationStatus::pass);
    }

    // μ_r below μ_s breaks relation 1 only
    const auto broken = audit_implications(RegularityConstants{1.0, 0.5, 0.5, 4.0, 1.0}, 0.0);
    CHECK(broken[0].status == RelationStatus::fail);

    const ProblemSpec s = make_benchmark(BenchmarkId::sine_quad);
    const RegularityReport r = estimate_constants(s, EstimationPlan::grid(-10, 10, 20001));
    const auto audit = audit_implications(r.constants(), s.weak_convexity);
    for (const auto& c : audit) {
        CAPTURE(c.id);
        CHECK(c.ok());
    }
    CHECK(audit[3].status == RelationStatus::premise_fails);
    CHECK(audit[5].status == RelationStatus::not_triggered);

    const nlohmann::json j = to_json(audit);
    REQUIRE(j.size() == 6);
    CHECK(j[5]["status"] == "not_triggered");
    CHECK(j[0].contains("expected"));
}
