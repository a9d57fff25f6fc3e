#include "proxreg/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "proxreg/hinge.hpp"

namespace proxreg {

namespace {

SolutionInfo point_solution(const Vector& x, const Vector& star) {
    return SolutionInfo{star, (x - star).norm()};
}

ProblemSpec quad1d() {
    ProblemSpec p;
    p.name = "quad1d";
    p.dimension = 1;
    p.value = [](const Vector& x) { return ExtendedReal::finite(x[0] * x[0]); };
    p.subgradient = [](const Vector& x) { return Subdifferential::gradient(2.0 * x); };
    p.smoothness = 2.0;
    p.strong_convexity = 2.0;
    p.optimum_value = 0.0;
    p.solution = [](const Vector& x) { return point_solution(x, Vector::Zero(1)); };
    p.prox_closed_form = [](const Vector& z, double c) -> Vector { return z / (1.0 + 2.0 * c); };
    p.structure = ScalarStructure{};
    p.known.sharp = RegularityConstants{1.0, 2.0, 0.5, 4.0, 1.0};
    p.known.default_nu = 1.0;
    p.known.bracket_lo = -1.0;
    p.known.bracket_hi = 1.0;
    p.known.qg_global = true;
    p.known.gd_rsi = 2.0;
    p.known.gd_pl = 2.0;
    return p;
}

ProblemSpec quad_quartic() {
    ProblemSpec p;
    p.name = "quad_quartic";
    p.dimension = 1;
    p.value = [](const Vector& x) {
        const double t = x[0];
        return ExtendedReal::finite(std::abs(t) <= 1.0 ? t * t : 0.5 * t * t * t * t + 0.5);
    };
    p.subgradient = [](const Vector& x) {
        const double t = x[0];
        return Subdifferential::gradient(scalar(std::abs(t) <= 1.0 ? 2.0 * t : 2.0 * t * t * t));
    };
    p.optimum_value = 0.0;
    p.solution = [](const Vector& x) { return point_solution(x, Vector::Zero(1)); };
    p.structure = ScalarStructure{{-1.0, 1.0}};
    p.known.sharp = RegularityConstants{1.0, 2.0, 0.5, 4.0, 1.0};
    p.known.bracket_lo = -2.0;
    p.known.bracket_hi = 2.0;
    p.known.default_nu = 8.5;  // f(±2)
    p.known.qg_global = true;
    return p;
}

ProblemSpec sine_quad() {
    ProblemSpec p;
    p.name = "sine_quad";
    p.dimension = 1;
    p.value = [](const Vector& x) {
        const double s = std::sin(x[0]);
        return ExtendedReal::finite(x[0] * x[0] + 6.0 * s * s);
    };
    p.subgradient = [](const Vector& x) {
        return Subdifferential::gradient(scalar(2.0 * x[0] + 6.0 * std::sin(2.0 * x[0])));
    };
    // f'' = 2 + 12 cos(2x) ∈ [−10, 14]
    p.weak_convexity = 10.0;
    p.smoothness = 14.0;
    p.optimum_value = 0.0;
    p.solution = [](const Vector& x) { return point_solution(x, Vector::Zero(1)); };
    p.structure = ScalarStructure{};
    RegularityConstants sharp;
    sharp.mu_q = 1.0;
    p.known.sharp = sharp;
    p.known.bracket_lo = -10.0;
    p.known.bracket_hi = 10.0;
    p.known.qg_global = true;
    p.known.pl_eb_fail_globally = true;
    return p;
}

ProblemSpec wc_piecewise() {
    ProblemSpec p;
    p.name = "wc_piecewise";
    p.dimension = 1;
    p.value = [](const Vector& x) {
        const double t = x[0];
        if (t > -1.0 && t < -0.5) return ExtendedReal::finite(1.0 - t * t);
        return ExtendedReal::finite(3.0 * (t + 1.0) * (t + 1.0));
    };
    p.subgradient = [](const Vector& x) {
        const double t = x[0];
        Subdifferential sd;
        if (t == -1.0) {
            sd.exact = Box{scalar(0.0), scalar(2.0)};
        } else if (t == -0.5) {
            sd.exact = Box{scalar(1.0), scalar(3.0)};
        } else if (t > -1.0 && t < -0.5) {
            sd.exact = Box{scalar(-2.0 * t), scalar(-2.0 * t)};
        } else {
            sd.exact = Box{scalar(6.0 * (t + 1.0)), scalar(6.0 * (t + 1.0))};
        }
        sd.element = sd.exact->lower;
        return sd;
    };
    p.weak_convexity = 2.0;
    p.optimum_value = 0.0;
    p.solution = [](const Vector& x) { return point_solution(x, scalar(-1.0)); };
    p.structure = ScalarStructure{{-1.0, -0.5}};
    RegularityConstants sharp;
    sharp.mu_s = 0.0;  // not convex: SC fails
    sharp.mu_r = 2.0;
    sharp.mu_e = 0.5;
    sharp.mu_p = 4.0 / 3.0;
    sharp.mu_q = 3.0;
    p.known.sharp = sharp;
    p.known.default_nu = 1.0;
    p.known.bracket_lo = -2.0;
    p.known.bracket_hi = 0.0;
    return p;
}

ProblemSpec aniso_quad(double L) {
    if (!(L >= 1.0)) throw BadShape("aniso_quad: L must be >= 1");
    ProblemSpec p;
    p.name = "aniso_quad";
    p.dimension = 2;
    const Vector q = (Vector(2) << 1.0, L).finished();
    p.value = [q](const Vector& x) {
        return ExtendedReal::finite(0.5 * (q.array() * x.array().square()).sum());
    };
    p.subgradient = [q](const Vector& x) {
        return Subdifferential::gradient(q.cwiseProduct(x));
    };
    p.smoothness = L;
    p.strong_convexity = 1.0;
    p.optimum_value = 0.0;
    p.solution = [](const Vector& x) { return point_solution(x, Vector::Zero(2)); };
    p.prox_closed_form = [q](const Vector& z, double c) -> Vector {
        return z.array() / (1.0 + c * q.array());
    };
    CompositeStructure cs;
    cs.A = Matrix::Zero(2, 2);
    cs.A(0, 0) = 1.0;
    cs.A(1, 1) = std::sqrt(L);
    cs.y = Vector::Zero(2);
    cs.smooth_lipschitz = L;
    p.structure = cs;
    p.known.sharp = RegularityConstants{0.5, 1.0, 1.0, 2.0, 0.5};
    p.known.bracket_lo = -1.0;
    p.known.bracket_hi = 1.0;
    p.known.qg_global = true;
    p.known.gd_rsi = 1.0;
    p.known.gd_pl = 1.0;
    return p;
}

}  // namespace

std::string_view to_string(BenchmarkId id) {
    switch (id) {
        case BenchmarkId::quad1d: return "quad1d";
        case BenchmarkId::quad_quartic: return "quad_quartic";
        case BenchmarkId::sine_quad: return "sine_quad";
        case BenchmarkId::wc_piecewise: return "wc_piecewise";
        case BenchmarkId::aniso_quad: return "aniso_quad";
    }
    return "unknown";
}

BenchmarkId parse_benchmark_id(std::string_view name) {
    for (auto id : {BenchmarkId::quad1d, BenchmarkId::quad_quartic, BenchmarkId::sine_quad,
                    BenchmarkId::wc_piecewise, BenchmarkId::aniso_quad}) {
        if (to_string(id) == name) return id;
    }
    throw ConfigError("unknown benchmark '" + std::string(name) + "'");
}

ProblemSpec make_benchmark(BenchmarkId id, double aniso_L) {
    switch (id) {
        case BenchmarkId::quad1d: return quad1d();
        case BenchmarkId::quad_quartic: return quad_quartic();
        case BenchmarkId::sine_quad: return sine_quad();
        case BenchmarkId::wc_piecewise: return wc_piecewise();
        case BenchmarkId::aniso_quad: return aniso_quad(aniso_L);
    }
    throw ConfigError("unknown benchmark id");
}

std::string_view to_string(MLKind kind) {
    switch (kind) {
        case MLKind::svm: return "svm";
        case MLKind::lasso: return "lasso";
        case MLKind::elastic_net: return "elastic_net";
    }
    return "unknown";
}

MLKind parse_ml_kind(std::string_view name) {
    for (auto k : {MLKind::svm, MLKind::lasso, MLKind::elastic_net}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown ml problem kind '" + std::string(name) + "'");
}

LassoData generate_lasso_data(std::size_t n, std::size_t m, std::size_t s, std::uint64_t seed) {
    if (n == 0 || m == 0) throw BadShape("generate_lasso_data: n and m must be positive");
    if (s >= m) throw BadShape("generate_lasso_data: need s < m");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    LassoData d;
    d.A.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (Eigen::Index j = 0; j < d.A.cols(); ++j) {
        for (Eigen::Index i = 0; i < d.A.rows(); ++i) d.A(i, j) = normal(rng);
    }
    d.x_hat.resize(static_cast<Eigen::Index>(m));
    for (Eigen::Index j = 0; j < d.x_hat.size(); ++j) d.x_hat[j] = normal(rng);

    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < s; ++k) d.x_hat[static_cast<Eigen::Index>(idx[k])] = 0.0;

    d.y = d.A * d.x_hat;
    return d;
}

Dataset generate_svm_blobs(std::size_t n, std::size_t d, std::uint64_t seed, double separation) {
    if (n == 0 || d == 0) throw BadShape("generate_svm_blobs: n and d must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    Dataset ds;
    ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    ds.labels.resize(static_cast<Eigen::Index>(n));
    const double shift = separation / std::sqrt(static_cast<double>(d));
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
        const double b = coin(rng) ? 1.0 : -1.0;
        ds.labels[i] = b;
        for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
            ds.features(i, j) = b * shift + normal(rng);
        }
    }
    ds.source = "synthetic(seed=" + std::to_string(seed) + ")";
    return ds;
}

double largest_squared_singular_value(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    const Matrix G = A.transpose() * A;
    Vector v = Vector::Ones(G.rows()) / std::sqrt(static_cast<double>(G.rows()));
    double lambda = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Vector w = G * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        const double next = v.dot(w);
        v = w / norm;
        if (std::abs(next - lambda) <= 1e-10 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    // Rayleigh quotient underestimates; the final norm is a safe upper estimate.
    return std::max(lambda, (G * v).norm());
}

ProblemSpec make_composite_problem(std::string name, const Matrix& A, const Vector& y,
                                   double l1, double l2) {
    if (A.rows() != y.size()) throw BadShape("composite problem: rows(A) != size(y)");
    if (l1 < 0.0 || l2 < 0.0) throw BadShape("composite problem: negative regularizer");

    CompositeStructure cs;
    cs.A = A;
    cs.y = y;
    cs.l1 = l1;
    cs.l2 = l2;
    cs.smooth_lipschitz = largest_squared_singular_value(A);

    ProblemSpec p;
    p.name = std::move(name);
    p.dimension = static_cast<std::size_t>(A.cols());
    p.value = [cs](const Vector& x) {
        const Vector r = cs.y - cs.A * x;
        return ExtendedReal::finite(0.5 * r.squaredNorm() + cs.l1 * x.lpNorm<1>() +
                                    0.5 * cs.l2 * x.squaredNorm());
    };
    p.subgradient = [cs](const Vector& x) {
        const Vector g = cs.A.transpose() * (cs.A * x - cs.y) + cs.l2 * x;
        Box box{g, g};
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] > 0.0) {
                box.lower[i] += cs.l1;
                box.upper[i] += cs.l1;
            } else if (x[i] < 0.0) {
                box.lower[i] -= cs.l1;
                box.upper[i] -= cs.l1;
            } else {
                box.lower[i] -= cs.l1;
                box.upper[i] += cs.l1;
            }
        }
        Subdifferential sd;
        sd.element = box.closest_to_negative(Vector::Zero(x.size()));
        sd.exact = std::move(box);
        return sd;
    };
    if (l1 == 0.0) p.smoothness = cs.smooth_lipschitz + l2;
    if (l2 > 0.0) p.strong_convexity = l2;
    p.structure = std::move(cs);
    return p;
}

ProblemSpec make_ml_problem(const MLProblemParams& params, const Dataset& data) {
    if (params.kind != MLKind::svm) {
        throw BadShape("make_ml_problem: a Dataset builds svm problems only");
    }
    if (data.features.rows() != data.labels.size() || data.features.rows() == 0) {
        throw BadShape("make_ml_problem: features/labels size mismatch");
    }
    for (Eigen::Index i = 0; i < data.labels.size(); ++i) {
        if (data.labels[i] != 1.0 && data.labels[i] != -1.0) {
            throw BadShape("make_ml_problem: svm labels must be in {-1, +1}");
        }
    }
    if (!(params.svm_reg > 0.0)) throw BadShape("make_ml_problem: svm regularizer must be > 0");

    HingeStructure hs{data.features, data.labels, params.svm_reg};
    ProblemSpec p;
    p.name = "svm";
    p.dimension = data.dimension();
    p.value = [hs](const Vector& x) { return ExtendedReal::finite(hinge_value(hs, x)); };
    p.subgradient = [hs](const Vector& x) {
        Subdifferential sd;
        sd.element = hinge_element(hs, x, Vector::Zero(x.size())).element;
        return sd;
    };
    p.strong_convexity = params.svm_reg;
    p.structure = std::move(hs);
    return p;
}

ProblemSpec make_ml_problem(const MLProblemParams& params, const Matrix& A, const Vector& y) {
    switch (params.kind) {
        case MLKind::lasso:
            if (!(params.lambda > 0.0)) throw BadShape("lasso: lambda must be > 0");
            return make_composite_problem("lasso", A, y, params.lambda, 0.0);
        case MLKind::elastic_net:
            if (!(params.lambda > 0.0) || !(params.mu_en > 0.0)) {
                throw BadShape("elastic_net: lambda and mu must be > 0");
            }
            return make_composite_problem("elastic_net", A, y, params.lambda, params.mu_en);
        case MLKind::svm:
            break;
    }
    throw BadShape("make_ml_problem: svm needs a labelled Dataset");
}

}  // namespace proxreg
