#pragma once

#include "proxreg/problem.hpp"

namespace proxreg {

/// Margins inside this band are treated as hinge kinks, where any slope in [0, 1]
/// is admissible. The induced error in the subgradient inequality is at most
/// kKinkBand per sample.
inline constexpr double kKinkBand = 1e-10;

struct HingeElement {
    Vector element;  ///< −(1/n) Aᵀ(b∘s) + reg·x + shift
    Vector slopes;   ///< s_i ∈ [0, 1], fixed to 0/1 outside the kink band
    double norm = 0.0;
};

double hinge_value(const HingeStructure& h, const Vector& x);

/// Margins 1 − b_i a_iᵀx.
Vector hinge_margins(const HingeStructure& h, const Vector& x);

/// Builds an element of ∂f(x) + shift, choosing kink slopes to minimize its norm.
/// `initial_slopes` seeds the kink slopes (clamped into [0, 1]).
HingeElement hinge_element(const HingeStructure& h, const Vector& x, const Vector& shift,
                           const Vector* initial_slopes = nullptr);

}  // namespace proxreg
