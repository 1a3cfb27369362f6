#pragma once

#include "slackal/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace slackal {

namespace functions {

// Raw objectives and constraints, exactly as published (no sign changes).
double f1(const Vector& x);
double f2(const Vector& x);   // rescaled, centered Goldstein-Price
double c1(const Vector& x);   // toy sinusoidal constraint
double c2(const Vector& x);   // toy circular constraint
double c3(const Vector& x);   // 15 minus rescaled Branin
double c4(const Vector& x);   // Parr et al. constraint
double c5(const Vector& x);   // 3 minus Ackley on [-1, 2]^4
double c6(const Vector& x);   // rescaled, centered Hartmann-4

// The Hartmann constants: C_i, a(j, i), p(j, i).
const Vector& hartmann_C();
const Matrix& hartmann_a();
const Matrix& hartmann_p();

} // namespace functions

using ScalarFunction = std::function<double(const Vector&)>;

struct ProblemOptions {
    // "prose": -c1 <= 0, c3 = 0, c4 = 0.  "printed": -c1 <= 0, c2 = 0, c3 = 0.
    std::string gsbp_variant = "prose";
    // Use every inequality with the sign exactly as printed (c_j <= 0).
    bool printed_orientation = false;
};

struct ReferenceOptimum {
    Vector x;
    double f = 0.0;
    double epsilon = 0.0;
    std::string tag;
};

struct ProblemSpec {
    std::string name;
    int dim = 0;
    Box bounds;
    ScalarFunction objective;
    bool objective_known = true;
    std::vector<ScalarFunction> constraints;  // inequalities first
    std::vector<std::string> constraint_labels;
    ConstraintKinds kinds;
    // Progress value reported while no valid point has been found.
    double no_valid_ceiling = 0.0;
    ProblemOptions options;
};

struct Evaluation {
    double f = 0.0;
    Vector c;
};

// Known names: lsq, gsbp, lah (case-insensitive).
ProblemSpec make_problem(const std::string& name, const ProblemOptions& options = {});
std::vector<std::string> problem_names();

// Joint evaluation of objective and all constraints; DomainError outside the box.
Evaluation evaluate(const ProblemSpec& problem, const Vector& x);

// Dense-grid search for the best valid point followed by a local
// multiplier-method polish on the analytic functions. Results are cached per
// (problem, options, resolution, epsilon). grid_resolution <= 0 selects 1000
// points per axis in 2-d and 50 in 4-d.
ReferenceOptimum reference_optimum(const ProblemSpec& problem, int grid_resolution = 0,
                                   double epsilon = 1e-2);

} // namespace slackal
