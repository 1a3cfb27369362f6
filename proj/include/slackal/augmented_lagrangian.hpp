#pragma once

#include "slackal/common.hpp"

#include <limits>
#include <vector>

namespace slackal {

// Multipliers are ordered like c(x) = [g(x); h(x)].
struct ALState {
    Vector lambda;
    double rho = 1.0;
    double epsilon = 1e-2;
    int iteration = 0;

    void validate() const;
};

// Evaluated designs; row i of X and C pair with f[i]. The first n0 rows are
// the initial design.
struct EvalHistory {
    Matrix X;
    Vector f;
    Matrix C;
    int n0 = 0;

    EvalHistory() = default;
    EvalHistory(int dim, int constraints) : X(0, dim), f(0), C(0, constraints) {}

    [[nodiscard]] int size() const { return static_cast<int>(f.size()); }
    [[nodiscard]] Vector x(int i) const { return X.row(i).transpose(); }
    [[nodiscard]] Vector c(int i) const { return C.row(i).transpose(); }
    void append(const Vector& x, double f_val, const Vector& c_val);
};

// f + lambda'(c + s) + (1/2rho) sum (c_j + s_j)^2
[[nodiscard]] double slack_al_value(double f_val, const Vector& c_vals, const Vector& s,
                                    const ALState& state);

// f + lambda_g'g + lambda_h'h + (1/2rho) [sum max(0, g)^2 + sum h^2]
[[nodiscard]] double original_al_value(double f_val, const Vector& g_vals, const Vector& h_vals,
                                       const ALState& state);

// s_j = max(0, -lambda_j rho - v_j) for inequalities, 0 for equalities.
[[nodiscard]] Vector optimal_slack(const Vector& c_or_mu, const ALState& state,
                                   const ConstraintKinds& kinds);

// lambda_j += (c_j + s_j) / rho, with no clipping.
[[nodiscard]] ALState update_multipliers(const ALState& state, const Vector& c_at_xk,
                                         const Vector& s_k);

// Classic update: lambda_g = max(0, lambda_g + g / rho), lambda_h += h / rho.
[[nodiscard]] ALState update_multipliers_original(const ALState& state, const Vector& c_at_xk,
                                                  const ConstraintKinds& kinds);

// rho is kept when every inequality holds and every |h| <= epsilon, halved
// otherwise. Advances the iteration counter.
[[nodiscard]] ALState update_penalty(const ALState& state, const Vector& c_at_xk,
                                     const ConstraintKinds& kinds);

[[nodiscard]] std::vector<bool> check_validity(const Vector& c_vals, const ConstraintKinds& kinds,
                                               double epsilon);
[[nodiscard]] bool is_valid(const Vector& c_vals, const ConstraintKinds& kinds, double epsilon);

// lambda = 0; rho from the balance between the smallest squared violation
// among invalid points and twice the best valid objective.
[[nodiscard]] ALState initialize(const EvalHistory& history, const ConstraintKinds& kinds,
                                 double epsilon);

struct Incumbent {
    double value = std::numeric_limits<double>::infinity();
    int index = -1;
};

// min_i slack_al_value(f_i, c_i, s*(c_i)) under the given state; ties go to
// the lowest index.
[[nodiscard]] Incumbent composite_incumbent(const EvalHistory& history, const ALState& state,
                                            const ConstraintKinds& kinds);

// min_i original_al_value(f_i, g_i, h_i) under the given state.
[[nodiscard]] Incumbent original_incumbent(const EvalHistory& history, const ALState& state,
                                           const ConstraintKinds& kinds);

// Lowest objective among valid rows; index -1 when there is none.
[[nodiscard]] Incumbent best_valid(const EvalHistory& history, const ConstraintKinds& kinds,
                                   double epsilon);

} // namespace slackal
