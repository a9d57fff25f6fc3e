#pragma once

// Independent numerical helpers used only by the tests. Nothing here calls into
// the library's solvers.

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <Eigen/Dense>

namespace oracle {

// minimizer of a unimodal f on [a, b]
inline double golden_section(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-13) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 500 && b - a > tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// root of g on [a, b] given a sign change
inline double bisection(const std::function<double(double)>& g, double a, double b,
                        double tol = 1e-14) {
    double ga = g(a);
    for (int it = 0; it < 300 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline Eigen::VectorXd gradient_fd(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd a = x, b = x;
        a[i] += h;
        b[i] -= h;
        g[i] = (f(a) - f(b)) / (2.0 * h);
    }
    return g;
}

// coarse-to-fine grid search on a 2D box
inline Eigen::Vector2d grid_argmin_2d(const std::function<double(const Eigen::Vector2d&)>& f,
                                      Eigen::Vector2d lo, Eigen::Vector2d hi, int n = 41,
                                      int rounds = 30) {
    Eigen::Vector2d best = 0.5 * (lo + hi);
    double fbest = f(best);
    for (int r = 0; r < rounds; ++r) {
        const Eigen::Vector2d step = (hi - lo) / (n - 1);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const Eigen::Vector2d x(lo[0] + i * step[0], lo[1] + j * step[1]);
                const double v = f(x);
                if (v < fbest) {
                    fbest = v;
                    best = x;
                }
            }
        }
        lo = best - 2.0 * step;
        hi = best + 2.0 * step;
    }
    return best;
}

}  // namespace oracle
