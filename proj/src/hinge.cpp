#include "proxreg/hinge.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace proxreg {

namespace {
constexpr int kPolishSweeps = 200;
}

double hinge_value(const HingeStructure& h, const Vector& x) {
    const Vector m = hinge_margins(h, x);
    const double n = static_cast<double>(h.features.rows());
    return m.cwiseMax(0.0).sum() / n + 0.5 * h.reg * x.squaredNorm();
}

Vector hinge_margins(const HingeStructure& h, const Vector& x) {
    return Vector::Ones(h.features.rows()) - h.labels.cwiseProduct(h.features * x);
}

HingeElement hinge_element(const HingeStructure& h, const Vector& x, const Vector& shift,
                           const Vector* initial_slopes) {
    const Eigen::Index n = h.features.rows();
    const double inv_n = 1.0 / static_cast<double>(n);
    const Vector m = hinge_margins(h, x);

    HingeElement out;
    out.slopes.resize(n);
    std::vector<Eigen::Index> kinks;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(m[i]) <= kKinkBand) {
            double s0 = initial_slopes ? (*initial_slopes)[i] : 0.5;
            out.slopes[i] = std::clamp(s0, 0.0, 1.0);
            kinks.push_back(i);
        } else {
            out.slopes[i] = m[i] > 0.0 ? 1.0 : 0.0;
        }
    }

    Vector v = -inv_n * (h.features.transpose() * h.labels.cwiseProduct(out.slopes)) +
               h.reg * x + shift;

    // Coordinate descent on the kink slopes: min_s ‖v(s)‖² over s ∈ [0,1]^K.
    for (int sweep = 0; sweep < kPolishSweeps && !kinks.empty(); ++sweep) {
        double moved = 0.0;
        for (Eigen::Index i : kinks) {
            const Vector u = inv_n * h.labels[i] * h.features.row(i).transpose();
            const double uu = u.squaredNorm();
            if (uu == 0.0) continue;
            const double s_new = std::clamp(out.slopes[i] + v.dot(u) / uu, 0.0, 1.0);
            const double ds = s_new - out.slopes[i];
            if (ds != 0.0) {
                v -= ds * u;
                out.slopes[i] = s_new;
                moved = std::max(moved, std::abs(ds));
            }
        }
        if (moved < 1e-15) break;
    }

    out.element = std::move(v);
    out.norm = out.element.norm();
    return out;
}

}  // namespace proxreg
