#pragma once

#include "slackal/common.hpp"

#include <functional>

namespace slackal {

// Objective returning f(x); when `grad` is non-null it must also be filled.
using ObjectiveWithGradient = std::function<double(const Vector& x, Vector* grad)>;

struct MinimizeOptions {
    int max_iterations = 100;
    int max_evaluations = 1000;  // counts objective calls, gradient included
    double gradient_tolerance = 1e-6;
    double function_tolerance = 1e-12;
};

struct MinimizeResult {
    Vector x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Projected BFGS for box constraints. Variables sitting on a bound with the
// gradient pointing outward are frozen for the step; the quasi-Newton
// direction acts on the rest and a projected Armijo backtrack keeps iterates
// feasible.
MinimizeResult minimize_box(const ObjectiveWithGradient& objective, const Vector& start,
                            const Vector& lower, const Vector& upper,
                            const MinimizeOptions& options = {});

// Wraps a value-only function with central differences (one-sided at the
// bounds). Each gradient costs 2d extra evaluations.
ObjectiveWithGradient with_numeric_gradient(std::function<double(const Vector&)> f,
                                            const Vector& lower, const Vector& upper,
                                            double relative_step = 1e-6);

} // namespace slackal
