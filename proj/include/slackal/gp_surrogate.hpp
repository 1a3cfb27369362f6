#pragma once

#include "slackal/common.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <optional>

namespace slackal {

// Anisotropic squared-exponential kernel with a constant mean:
//   k(x, x') = signal_variance * exp(-0.5 * sum_k ((u_k - u'_k) / lengthscale_k)^2)
// where u are the inputs mapped to the unit box. The nugget is added to the
// diagonal of the correlation matrix.
struct GPConfig {
    Vector lengthscales;
    double signal_variance = 1.0;
    double nugget = 1e-8;
    double mean = 0.0;

    void validate() const;
};

struct GPFitOptions {
    int restarts = 5;
    double min_lengthscale = 1e-2;
    double max_lengthscale = 10.0;
    double initial_nugget = 1e-8;
    double max_nugget = 1e-4;
    int max_iterations = 100;
    std::uint64_t seed = 0;
    // Extra local search started from these lengthscales (e.g. the previous fit).
    std::optional<Vector> warm_start;
};

struct Prediction {
    double mean = 0.0;
    double sd = 0.0;
};

class GPSurrogate {
public:
    // Maximum-likelihood fit. Mean and signal variance are profiled out; the
    // lengthscales are searched on the log scale from LHS multi-starts.
    static GPSurrogate fit(const Matrix& X, const Vector& y, const Box& bounds,
                           const GPFitOptions& options = {});

    // Conditions on data with fixed hyperparameters. The nugget is escalated
    // (x10 up to max_nugget) only if the factorization fails.
    static GPSurrogate condition_on(const Matrix& X, const Vector& y, const Box& bounds,
                                    const GPConfig& config, double max_nugget = 1e-4);

    // Adds one observation and re-estimates hyperparameters, warm-started
    // from the current ones.
    [[nodiscard]] GPSurrogate refit_with(const Vector& x_new, double y_new,
                                         GPFitOptions options = {}) const;

    // Adds one observation keeping every hyperparameter fixed.
    [[nodiscard]] GPSurrogate condition_with(const Vector& x_new, double y_new) const;

    [[nodiscard]] Prediction predict(const Vector& x) const;
    // Rows of X are query points; returns (means, sds).
    void predict(const Matrix& X, Vector& means, Vector& sds) const;

    [[nodiscard]] double log_marginal_likelihood() const;
    // Leave-one-out residuals y_i - mu_{-i}(x_i) at fixed hyperparameters.
    [[nodiscard]] Vector loo_residuals() const;

    [[nodiscard]] const GPConfig& config() const { return config_; }
    [[nodiscard]] const Box& bounds() const { return bounds_; }
    [[nodiscard]] const Matrix& inputs() const { return X_; }
    [[nodiscard]] const Vector& outputs() const { return y_; }
    [[nodiscard]] int size() const { return static_cast<int>(y_.size()); }
    [[nodiscard]] int dim() const { return bounds_.dim(); }

private:
    GPSurrogate() = default;
    void factorize(double max_nugget);
    [[nodiscard]] Vector correlations(const Vector& u) const;

    Box bounds_;
    Matrix X_;  // original coordinates
    Matrix U_;  // unit-box coordinates
    Vector y_;
    GPConfig config_;
    Eigen::LLT<Matrix> llt_;
    Vector alpha_;  // R^{-1} (y - mean)
};

// Throws DuplicateInputError if two rows agree within tol in every coordinate.
void check_distinct_rows(const Matrix& X, double tol = 1e-12);

} // namespace slackal
