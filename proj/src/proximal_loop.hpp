#pragma once

#include <functional>
#include <optional>
#include <string>

#include "proxreg/ppm.hpp"

namespace proxreg::detail {

struct StepOutcome {
    ProxResult prox;
    std::optional<double> eps;
    std::optional<double> delta;
    std::optional<bool> criterion_ok;
    std::optional<double> ref_prox_dist;
    std::optional<double> ref_prox_error;
};

using Stepper = std::function<StepOutcome(std::size_t k, const Vector& x, double c)>;

/// Shared outer loop of the exact and inexact proximal point methods.
IterationTrace run_proximal_loop(const ProblemSpec& p, const Vector& x0,
                                 const StepSchedule& sched, const PpmOptions& opts,
                                 std::string solver, const Stepper& step);

}  // namespace proxreg::detail
