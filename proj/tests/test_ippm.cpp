#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "proxreg/ippm.hpp"
#include "proxreg/zoo.hpp"

using namespace proxreg;

namespace {

ProblemSpec elastic_net() {
    const LassoData d = generate_lasso_data(10, 20, 5, 4);
    return reference_solution(make_composite_problem("elastic_net", d.A, d.y, 1.0, 1.0), 3000);
}

InexactCriterion criterion(CriterionKind kind, double eps0, double delta0, double gamma) {
    InexactCriterion c;
    c.kind = kind;
    c.eps0 = eps0;
    c.delta0 = delta0;
    c.gamma = gamma;
    return c;
}

}  // namespace

TEST_CASE("criterion parsing and validation") {
    CHECK(parse_criterion_kind("A'") == CriterionKind::Aprime);
    CHECK(parse_criterion_kind("Bprime") == CriterionKind::Bprime);
    CHECK(parse_criterion_kind("AB") == CriterionKind::AB);
    CHECK_THROWS_AS(parse_criterion_kind("C"), ConfigError);

    CHECK_THROWS_AS(criterion(CriterionKind::Aprime, -1.0, 0.5, 0.5).validate(), ConfigError);
    CHECK_THROWS_AS(criterion(CriterionKind::Aprime, 0.1, 0.5, 1.0).validate(), ConfigError);
    CHECK_NOTHROW(criterion(CriterionKind::Bprime, 0.1, 0.5, 0.5).validate());

    const InexactCriterion c = criterion(CriterionKind::AB, 0.2, 0.4, 0.5);
    CHECK(c.eps(2) == doctest::Approx(0.05));
    CHECK(c.delta(1) == doctest::Approx(0.2));
    CHECK(c.uses_eps());
    CHECK(c.uses_delta());
    CHECK(c.needs_reference());
    CHECK_FALSE(criterion(CriterionKind::Aprime, 0.1, 0.5, 0.5).needs_reference());
    CHECK(criterion(CriterionKind::Aprime, 0.0, 0.5, 0.5).is_exact());
    CHECK_FALSE(criterion(CriterionKind::AB, 0.0, 0.5, 0.5).is_exact());
}

TEST_CASE("zero tolerance reproduces exact ppm bitwise") {
    const LassoData d = generate_lasso_data(10, 20, 5, 2);
    const ProblemSpec lasso = make_composite_problem("lasso", d.A, d.y, 1.0, 0.0);
    for (const ProblemSpec& p : {make_benchmark(BenchmarkId::quad_quartic),
                                 make_benchmark(BenchmarkId::aniso_quad), lasso}) {
        CAPTURE(p.name);
        const Vector x0 = Vector::Constant(static_cast<Eigen::Index>(p.dimension), 1.5);
        IppmOptions opts;
        opts.ppm.max_iter = 30;
        const IterationTrace exact = run_ppm(p, x0, StepSchedule::constant(0.5), opts.ppm);
        const IterationTrace inexact =
            run_ippm(p, x0, StepSchedule::constant(0.5), criterion(CriterionKind::Aprime, 0.0, 0.5, 0.5), opts);
        REQUIRE(exact.records.size() == inexact.records.size());
        for (std::size_t k = 0; k < exact.records.size(); ++k) {
            CHECK(exact.records[k].x == inexact.records[k].x);
        }
        CHECK(inexact.solver == "ippm-Aprime");
    }
}

TEST_CASE("reference criteria need test mode") {
    const ProblemSpec p = make_benchmark(BenchmarkId::quad1d);
    for (CriterionKind kind : {CriterionKind::A, CriterionKind::B, CriterionKind::AB}) {
        CHECK_THROWS_AS(run_ippm(p, scalar(1.0), StepSchedule::constant(1.0), criterion(kind, 0.1, 0.5, 0.5)),
                        CriterionUnverifiable);
        IppmOptions opts;
        opts.test_mode = true;
        const IterationTrace t =
            run_ippm(p, scalar(1.0), StepSchedule::constant(1.0), criterion(kind, 0.1, 0.5, 0.5), opts);
        CHECK(t.records.front().ref_prox_error);
        CHECK(*t.records.front().criterion_ok);
    }
}

TEST_CASE("B' on elastic-net") {
    const ProblemSpec p = elastic_net();
    IppmOptions opts;
    opts.test_mode = true;
    opts.ppm.max_iter = 60;
    const InexactCriterion crit = criterion(CriterionKind::Bprime, 0.1, 0.5, 0.8);
    const IterationTrace t = run_ippm(p, Vector::Zero(20), StepSchedule::constant(1.0), crit, opts);
    REQUIRE(t.iterations() > 5);
    for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
        const auto& r = t.records[k];
        REQUIRE(r.delta);
        CHECK(*r.criterion_ok);
        const double step = (t.records[k + 1].x - r.x).norm();
        CHECK(*r.residual_norm <= *r.delta / *r.c * step + 1e-15);
        CHECK(*r.delta == doctest::Approx(crit.delta(k)));
    }
    CHECK(check_inexact_one_step(t).passed());
    CHECK(check_ippm_linear(t, RegularityConstants{1.0, 1.0, 1.0, 1.0, 0.5}, 1e30).passed());

    IterationTrace bad = t;
    bad.records[4].dist_S = *bad.records[4].dist_S + 10.0;
    CHECK(check_inexact_one_step(bad).first_violation() == 3u);

    const IterationTrace plain =
        run_ippm(p, Vector::Zero(20), StepSchedule::constant(1.0), crit, IppmOptions{});
    CHECK_THROWS_AS(check_inexact_one_step(plain), NotAvailable);
}

TEST_CASE("A' satisfies the inexact sublinear bound") {
    const ProblemSpec p = elastic_net();
    const Vector star = p.solution(Vector::Zero(20)).projection;
    IppmOptions opts;
    opts.ppm.max_iter = 80;
    const IterationTrace t = run_ippm(p, Vector::Zero(20), StepSchedule::constant(0.5),
                                      criterion(CriterionKind::Aprime, 0.5, 0.5, 0.6), opts);
    for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
        const auto& r = t.records[k];
        CHECK(*r.residual_norm <= *r.eps / *r.c);
    }
    CHECK(check_ippm_sublinear(t, std::nullopt, star).passed());

    IterationTrace bad = t;
    for (std::size_t k = 1; k < bad.records.size(); ++k) bad.records[k].f += 100.0;
    CHECK_FALSE(check_ippm_sublinear(bad, std::nullopt, star).passed());
}

TEST_CASE("averaged iterates obey Jensen") {
    const ProblemSpec p = elastic_net();
    IppmOptions opts;
    opts.ppm.max_iter = 40;
    const IterationTrace t = run_ippm(p, Vector::Zero(20), StepSchedule::sequence({0.2, 0.5, 1.0}),
                                      criterion(CriterionKind::Aprime, 0.3, 0.5, 0.7), opts);
    const auto avg = averaged_iterates(p, t);
    REQUIRE(avg.size() == t.iterations());
    for (const auto& a : avg) {
        CHECK(a.gap_bar <= a.bound_bar + 1e-12);
        CHECK(a.gap_tilde <= a.bound_tilde + 1e-12);
    }
    CHECK(avg.front().x_bar == t.records[1].x);
    CHECK(avg.front().x_tilde.isApprox(t.records[1].x, 1e-15));

    const ProblemSpec q = make_benchmark(BenchmarkId::quad1d);
    IppmOptions few;
    few.ppm.max_iter = 3;
    few.ppm.stop_gap = -1.0;
    few.ppm.stop_residual = -1.0;
    const IterationTrace still = run_ippm(q, scalar(0.0), StepSchedule::constant(1.0),
                                          criterion(CriterionKind::Aprime, 0.1, 0.5, 0.5), few);
    for (const auto& a : averaged_iterates(q, still)) {
        CHECK(a.x_bar[0] == 0.0);
        CHECK(a.gap_bar == 0.0);
        CHECK(a.bound_tilde == 0.0);
    }
}

TEST_CASE("inexact rate factor") {
    CHECK(inexact_theta(0.5, 0.0) == 0.5);
    double prev = inexact_theta(0.5, 0.0);
    for (double delta = 0.01; delta < 0.3; delta += 0.01) {
        const double th = inexact_theta(0.5, delta);
        CHECK(th > prev);
        prev = th;
    }
    CHECK(inexact_theta(0.5, 0.1) == doctest::Approx(0.7 / 0.9));
}

TEST_CASE("wc_piecewise contracts under B'") {
    const ProblemSpec p = make_benchmark(BenchmarkId::wc_piecewise);
    for (double x0 : {-3.0, -1.3, 1.5}) {
        CAPTURE(x0);
        IppmOptions opts;
        opts.test_mode = true;
        const IterationTrace t = run_ippm(p, scalar(x0), StepSchedule::constant(0.4),
                                          criterion(CriterionKind::Bprime, 0.1, 0.3, 0.5), opts);
        const IppmLinearReport rep = check_ippm_linear(t, *p.known.sharp, p.known.default_nu);
        REQUIRE(rep.k_bar);
        CHECK(rep.passed());
        CHECK(rep.theta_hat.size() == rep.distance.steps.size());
        // the run stops once 3(x + 1)² ≤ 1e-10
        CHECK(std::abs(t.records.back().x[0] + 1.0) <= 1e-5);
    }
}

TEST_CASE("iterate diameter stabilizes") {
    const ProblemSpec p = elastic_net();
    IppmOptions opts;
    opts.ppm.max_iter = 100;
    const IterationTrace t = run_ippm(p, Vector::Zero(20), StepSchedule::constant(1.0),
                                      criterion(CriterionKind::Aprime, 0.1, 0.5, 0.7), opts);
    REQUIRE(t.iterations() > 20);
    for (std::size_t k = 1; k < t.records.size(); ++k) {
        CHECK(t.records[k].diameter >= t.records[k - 1].diameter);
    }
    const double half = t.records[t.records.size() / 2].diameter;
    CHECK(t.diameter() <= half * (1.0 + 1e-3));
}
