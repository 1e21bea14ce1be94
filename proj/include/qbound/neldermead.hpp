// Derivative-free simplex minimization (Nelder-Mead) with standard
// reflect/expand/contract/shrink coefficients.  Objectives may return
// +infinity (or NaN, treated the same) to reject a point, which is how box
// bounds and infeasible parameter combinations are handled.

#pragma once

#include "qbound/common.hpp"

#include <functional>

namespace qbound {

struct NelderMeadOptions {
    int max_iterations = 400;
    double f_tolerance = 1e-10;  // spread of simplex values
    double x_tolerance = 1e-9;   // simplex diameter
};

struct NelderMeadResult {
    Vector x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& objective,
                             const Vector& start, const Vector& initial_step,
                             const NelderMeadOptions& options = {});

}  // namespace qbound
