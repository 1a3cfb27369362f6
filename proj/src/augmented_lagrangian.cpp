#include "slackal/augmented_lagrangian.hpp"

#include "slackal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace slackal {

void ALState::validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("ALState: rho must be positive");
    if (!(epsilon >= 0.0)) throw DomainError("ALState: epsilon must be nonnegative");
    if (iteration < 0) throw DomainError("ALState: iteration must be nonnegative");
}

void EvalHistory::append(const Vector& x, double f_val, const Vector& c_val) {
    if (size() > 0 || X.cols() > 0) require_size(x, static_cast<int>(X.cols()), "history input");
    if (size() > 0 || C.cols() > 0) require_size(c_val, static_cast<int>(C.cols()), "history constraints");
    const Eigen::Index n = f.size();
    X.conservativeResize(n + 1, x.size());
    X.row(n) = x.transpose();
    C.conservativeResize(n + 1, c_val.size());
    C.row(n) = c_val.transpose();
    f.conservativeResize(n + 1);
    f[n] = f_val;
}

double slack_al_value(double f_val, const Vector& c_vals, const Vector& s, const ALState& state) {
    require_size(s, static_cast<int>(c_vals.size()), "slacks");
    require_size(state.lambda, static_cast<int>(c_vals.size()), "multipliers");
    const Vector cs = c_vals + s;
    return f_val + state.lambda.dot(cs) + cs.squaredNorm() / (2.0 * state.rho);
}

double original_al_value(double f_val, const Vector& g_vals, const Vector& h_vals,
                         const ALState& state) {
    const Eigen::Index m = g_vals.size();
    require_size(state.lambda, static_cast<int>(m + h_vals.size()), "multipliers");
    const double penalty = g_vals.cwiseMax(0.0).squaredNorm() + h_vals.squaredNorm();
    return f_val + state.lambda.head(m).dot(g_vals) + state.lambda.tail(h_vals.size()).dot(h_vals) +
           penalty / (2.0 * state.rho);
}

Vector optimal_slack(const Vector& c_or_mu, const ALState& state, const ConstraintKinds& kinds) {
    require_size(c_or_mu, kinds.size(), "constraint values");
    require_size(state.lambda, kinds.size(), "multipliers");
    Vector s = Vector::Zero(kinds.size());
    for (int j = 0; j < kinds.m(); ++j) s[j] = std::max(0.0, -state.lambda[j] * state.rho - c_or_mu[j]);
    return s;
}

ALState update_multipliers(const ALState& state, const Vector& c_at_xk, const Vector& s_k) {
    require_size(c_at_xk, static_cast<int>(state.lambda.size()), "constraint values");
    require_size(s_k, static_cast<int>(state.lambda.size()), "slacks");
    ALState next = state;
    next.lambda = state.lambda + (c_at_xk + s_k) / state.rho;
    return next;
}

ALState update_multipliers_original(const ALState& state, const Vector& c_at_xk,
                                    const ConstraintKinds& kinds) {
    require_size(c_at_xk, kinds.size(), "constraint values");
    require_size(state.lambda, kinds.size(), "multipliers");
    ALState next = state;
    for (int j = 0; j < kinds.size(); ++j) {
        const double v = state.lambda[j] + c_at_xk[j] / state.rho;
        next.lambda[j] = kinds.is_equality(j) ? v : std::max(0.0, v);
    }
    return next;
}

ALState update_penalty(const ALState& state, const Vector& c_at_xk, const ConstraintKinds& kinds) {
    ALState next = state;
    if (!is_valid(c_at_xk, kinds, state.epsilon)) next.rho = 0.5 * state.rho;
    ++next.iteration;
    return next;
}

std::vector<bool> check_validity(const Vector& c_vals, const ConstraintKinds& kinds, double epsilon) {
    require_size(c_vals, kinds.size(), "constraint values");
    std::vector<bool> v(kinds.size());
    for (int j = 0; j < kinds.size(); ++j) {
        v[j] = kinds.is_equality(j) ? std::abs(c_vals[j]) <= epsilon : c_vals[j] <= 0.0;
    }
    return v;
}

bool is_valid(const Vector& c_vals, const ConstraintKinds& kinds, double epsilon) {
    const auto v = check_validity(c_vals, kinds, epsilon);
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

ALState initialize(const EvalHistory& history, const ConstraintKinds& kinds, double epsilon) {
    if (history.size() == 0) throw StateError("cannot initialize from an empty history");
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be nonnegative");
    ALState state;
    state.lambda = Vector::Zero(kinds.size());
    state.epsilon = epsilon;
    state.rho = 1.0;

    double min_violation = std::numeric_limits<double>::infinity();
    double min_valid_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < history.size(); ++i) {
        const Vector c = history.c(i);
        if (is_valid(c, kinds, epsilon)) {
            min_valid_f = std::min(min_valid_f, history.f[i]);
        } else {
            min_violation = std::min(min_violation, c.squaredNorm());
        }
    }
    if (!std::isfinite(min_violation)) return state;

    Vector sorted = history.f;
    std::sort(sorted.begin(), sorted.end());
    const int n = static_cast<int>(sorted.size());
    const double median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    double denom = std::isfinite(min_valid_f) ? min_valid_f : median;
    if (!(denom > 0.0)) denom = std::abs(median);
    if (!(denom > 0.0)) return state;
    const double rho = min_violation / (2.0 * denom);
    if (rho > 0.0 && std::isfinite(rho)) state.rho = rho;
    return state;
}

Incumbent composite_incumbent(const EvalHistory& history, const ALState& state,
                              const ConstraintKinds& kinds) {
    Incumbent best;
    for (int i = 0; i < history.size(); ++i) {
        const Vector c = history.c(i);
        const double y = slack_al_value(history.f[i], c, optimal_slack(c, state, kinds), state);
        if (y < best.value || best.index < 0) {
            best = {y, i};
        }
    }
    return best;
}

Incumbent original_incumbent(const EvalHistory& history, const ALState& state,
                             const ConstraintKinds& kinds) {
    Incumbent best;
    for (int i = 0; i < history.size(); ++i) {
        const Vector c = history.c(i);
        const double y = original_al_value(history.f[i], c.head(kinds.m()), c.tail(kinds.p()), state);
        if (y < best.value || best.index < 0) best = {y, i};
    }
    return best;
}

Incumbent best_valid(const EvalHistory& history, const ConstraintKinds& kinds, double epsilon) {
    Incumbent best;
    for (int i = 0; i < history.size(); ++i) {
        if (is_valid(history.c(i), kinds, epsilon) && history.f[i] < best.value) best = {history.f[i], i};
    }
    return best;
}

} // namespace slackal
