#include "slackal/gp_surrogate.hpp"

#include "slackal/box_minimizer.hpp"
#include "slackal/errors.hpp"
#include "slackal/lhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace slackal {

namespace {

constexpr double variance_floor = 1e-10;

Matrix to_unit_rows(const Matrix& X, const Box& bounds) {
    Matrix U(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) U.row(i) = bounds.to_unit(X.row(i).transpose()).transpose();
    return U;
}

Matrix correlation_matrix(const Matrix& U, const Vector& lengthscales) {
    const Eigen::Index n = U.rows();
    Matrix R(n, n);
    const Vector inv_l2 = lengthscales.array().square().inverse();
    for (Eigen::Index i = 0; i < n; ++i) {
        R(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double q = ((U.row(i) - U.row(j)).array().square() * inv_l2.transpose().array()).sum();
            R(i, j) = R(j, i) = std::exp(-0.5 * q);
        }
    }
    return R;
}

// Factorizes R + g I, escalating g by x10 up to max_nugget. Returns the
// nugget used, or NaN if every attempt failed.
double factor_with_escalation(const Matrix& R, double nugget, double max_nugget, Eigen::LLT<Matrix>& llt) {
    const Eigen::Index n = R.rows();
    for (double g = nugget; g <= max_nugget * (1.0 + 1e-9); g *= 10.0) {
        llt.compute(R + g * Matrix::Identity(n, n));
        if (llt.info() == Eigen::Success) {
            const auto d = llt.matrixLLT().diagonal();
            if ((d.array() > 0.0).all() && d.allFinite()) return g;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Concentrated negative log-likelihood over log-lengthscales for
// standardized outputs, with the constant mean and process variance profiled.
class ProfiledLikelihood {
public:
    ProfiledLikelihood(const Matrix& U, const Vector& y, double nugget, double max_nugget)
        : U_(U), y_(y), nugget_(nugget), max_nugget_(max_nugget) {
        const Eigen::Index n = U.rows();
        sq_.resize(U.cols());
        for (Eigen::Index k = 0; k < U.cols(); ++k) {
            sq_[k].resize(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) {
                    const double diff = U(i, k) - U(j, k);
                    sq_[k](i, j) = diff * diff;
                }
        }
    }

    struct Profile {
        double value;
        double mean;
        double variance;
        double nugget;
    };

    double operator()(const Vector& log_l, Vector* grad) const {
        Profile p{};
        return evaluate(log_l, grad, p);
    }

    double evaluate(const Vector& log_l, Vector* grad, Profile& out) const {
        const Eigen::Index n = U_.rows();
        const Eigen::Index d = U_.cols();
        const Vector l = log_l.array().exp();
        Matrix K = Matrix::Zero(n, n);
        for (Eigen::Index k = 0; k < d; ++k) K -= (0.5 / (l[k] * l[k])) * sq_[k];
        K = K.array().exp().matrix();

        Eigen::LLT<Matrix> llt;
        const double g = factor_with_escalation(K, nugget_, max_nugget_, llt);
        if (std::isnan(g)) return std::numeric_limits<double>::infinity();

        const Vector ones = Vector::Ones(n);
        const Vector r1 = llt.solve(ones);
        const Vector ry = llt.solve(y_);
        const double beta = ones.dot(ry) / ones.dot(r1);
        const Vector e = y_ - beta * ones;
        const Vector a = llt.solve(e);
        const double sigma2 = std::max(e.dot(a) / static_cast<double>(n), variance_floor);
        const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        const double value = 0.5 * static_cast<double>(n) * std::log(sigma2) + 0.5 * logdet;
        out = {value, beta, sigma2, g};

        if (grad != nullptr) {
            const Matrix M = llt.solve(Matrix::Identity(n, n)) - (a * a.transpose()) / sigma2;
            const Matrix MK = M.cwiseProduct(K);
            grad->resize(d);
            for (Eigen::Index k = 0; k < d; ++k) {
                (*grad)[k] = 0.5 * MK.cwiseProduct(sq_[k]).sum() / (l[k] * l[k]);
            }
        }
        return value;
    }

private:
    const Matrix& U_;
    const Vector& y_;
    double nugget_;
    double max_nugget_;
    std::vector<Matrix> sq_;
};

void validate_data(const Matrix& X, const Vector& y, const Box& bounds) {
    if (X.rows() < 2) throw DomainError("GP fit needs at least two points");
    if (X.cols() != bounds.dim()) throw ShapeError("GP inputs do not match the box dimension");
    if (y.size() != X.rows()) throw ShapeError("GP outputs do not match the number of inputs");
    if (!X.allFinite() || !y.allFinite()) throw DomainError("GP data must be finite");
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (!bounds.contains(X.row(i).transpose())) throw DomainError("GP input outside bounds");
    }
    check_distinct_rows(X);
}

} // namespace

void GPConfig::validate() const {
    if (lengthscales.size() == 0) throw ShapeError("GPConfig: no lengthscales");
    if (!(lengthscales.array() > 0.0).all() || !lengthscales.allFinite()) {
        throw DomainError("GPConfig: lengthscales must be positive");
    }
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
        throw DomainError("GPConfig: signal_variance must be positive");
    }
    if (!(nugget >= 1e-10)) throw DomainError("GPConfig: nugget must be at least 1e-10");
    if (!std::isfinite(mean)) throw DomainError("GPConfig: mean must be finite");
}

void check_distinct_rows(const Matrix& X, double tol) {
    for (Eigen::Index i = 1; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if ((X.row(i) - X.row(j)).cwiseAbs().maxCoeff() <= tol) {
                throw DuplicateInputError("rows " + std::to_string(j) + " and " + std::to_string(i) +
                                          " of the design coincide");
            }
        }
    }
}

GPSurrogate GPSurrogate::fit(const Matrix& X, const Vector& y, const Box& bounds,
                             const GPFitOptions& options) {
    validate_data(X, y, bounds);
    const int d = bounds.dim();
    const double n = static_cast<double>(y.size());

    const double y_mean = y.mean();
    double y_sd = std::sqrt((y.array() - y_mean).square().sum() / n);
    const bool constant = !(y_sd > 0.0);
    if (constant) y_sd = 1.0;
    const Vector ys = (y.array() - y_mean) / y_sd;
    const Matrix U = to_unit_rows(X, bounds);

    const double lo = std::log(options.min_lengthscale);
    const double hi = std::log(options.max_lengthscale);
    const Vector lower = Vector::Constant(d, lo);
    const Vector upper = Vector::Constant(d, hi);

    std::vector<Vector> starts;
    if (options.warm_start) {
        require_size(*options.warm_start, d, "warm-start lengthscales");
        starts.push_back(options.warm_start->array().log().matrix().cwiseMax(lower).cwiseMin(upper));
    }
    if (constant) {
        starts.push_back(Vector::Zero(d).cwiseMax(lower).cwiseMin(upper));
    } else {
        const Matrix S = latin_hypercube(std::max(options.restarts, 1), d, options.seed);
        for (Eigen::Index i = 0; i < S.rows(); ++i) {
            starts.push_back((lower.array() + S.row(i).transpose().array() * (hi - lo)).matrix());
        }
    }

    MinimizeOptions mopts;
    mopts.max_iterations = options.max_iterations;
    mopts.max_evaluations = 10 * options.max_iterations;
    mopts.gradient_tolerance = 1e-5;
    mopts.function_tolerance = 1e-10;

    // The search first keeps the initial nugget, so ill-conditioned long
    // lengthscales count as infeasible instead of buying a larger nugget that
    // would stop the fit from interpolating. Escalation is the fallback.
    Vector best;
    std::optional<ProfiledLikelihood> nll;
    for (const double cap : {options.initial_nugget, options.max_nugget}) {
        nll.emplace(U, ys, options.initial_nugget, cap);
        double best_value = std::numeric_limits<double>::infinity();
        for (const Vector& s : starts) {
            MinimizeResult r = constant ? MinimizeResult{s, (*nll)(s, nullptr), 0, 1, true}
                                        : minimize_box(*nll, s, lower, upper, mopts);
            if (std::isfinite(r.value) && r.value < best_value) {
                best_value = r.value;
                best = r.x;
            }
        }
        if (best.size() != 0) break;
    }
    if (best.size() == 0) throw FitError("kernel matrix singular at every hyperparameter start");

    ProfiledLikelihood::Profile prof{};
    nll->evaluate(best, nullptr, prof);

    GPConfig config;
    config.lengthscales = best.array().exp();
    config.signal_variance = prof.variance * y_sd * y_sd;
    config.mean = y_mean + y_sd * prof.mean;
    config.nugget = prof.nugget;
    return condition_on(X, y, bounds, config, options.max_nugget);
}

GPSurrogate GPSurrogate::condition_on(const Matrix& X, const Vector& y, const Box& bounds,
                                      const GPConfig& config, double max_nugget) {
    validate_data(X, y, bounds);
    config.validate();
    require_size(config.lengthscales, bounds.dim(), "lengthscales");
    GPSurrogate gp;
    gp.bounds_ = bounds;
    gp.X_ = X;
    gp.U_ = to_unit_rows(X, bounds);
    gp.y_ = y;
    gp.config_ = config;
    gp.factorize(std::max(max_nugget, config.nugget));
    return gp;
}

void GPSurrogate::factorize(double max_nugget) {
    const Matrix R = correlation_matrix(U_, config_.lengthscales);
    const double g = factor_with_escalation(R, config_.nugget, max_nugget, llt_);
    if (std::isnan(g)) throw FitError("kernel matrix not positive definite after nugget escalation");
    config_.nugget = g;
    alpha_ = llt_.solve((y_.array() - config_.mean).matrix());
}

GPSurrogate GPSurrogate::refit_with(const Vector& x_new, double y_new, GPFitOptions options) const {
    require_size(x_new, dim(), "new input");
    Matrix X(X_.rows() + 1, X_.cols());
    X << X_, x_new.transpose();
    Vector y(y_.size() + 1);
    y << y_, y_new;
    if (!options.warm_start) options.warm_start = config_.lengthscales;
    return fit(X, y, bounds_, options);
}

GPSurrogate GPSurrogate::condition_with(const Vector& x_new, double y_new) const {
    require_size(x_new, dim(), "new input");
    Matrix X(X_.rows() + 1, X_.cols());
    X << X_, x_new.transpose();
    Vector y(y_.size() + 1);
    y << y_, y_new;
    return condition_on(X, y, bounds_, config_);
}

Vector GPSurrogate::correlations(const Vector& u) const {
    const Vector inv_l2 = config_.lengthscales.array().square().inverse();
    Vector r(U_.rows());
    for (Eigen::Index i = 0; i < U_.rows(); ++i) {
        const double q = ((U_.row(i).transpose() - u).array().square() * inv_l2.array()).sum();
        r[i] = std::exp(-0.5 * q);
    }
    return r;
}

Prediction GPSurrogate::predict(const Vector& x) const {
    require_size(x, dim(), "query point");
    if (!bounds_.contains(x)) throw DomainError("prediction point outside the model bounds");
    const Vector r = correlations(bounds_.to_unit(x));
    const Vector v = llt_.matrixL().solve(r);
    const double var = config_.signal_variance * std::max(0.0, 1.0 - v.squaredNorm());
    return {config_.mean + r.dot(alpha_), std::sqrt(var)};
}

void GPSurrogate::predict(const Matrix& X, Vector& means, Vector& sds) const {
    if (X.cols() != dim()) throw ShapeError("query matrix has the wrong number of columns");
    const Eigen::Index m = X.rows();
    Matrix Rc(U_.rows(), m);
    for (Eigen::Index q = 0; q < m; ++q) {
        const Vector x = X.row(q).transpose();
        if (!bounds_.contains(x)) throw DomainError("prediction point outside the model bounds");
        Rc.col(q) = correlations(bounds_.to_unit(x));
    }
    means = (Rc.transpose() * alpha_).array() + config_.mean;
    const Matrix V = llt_.matrixL().solve(Rc);
    const Vector reduction = V.colwise().squaredNorm().transpose();
    sds = (config_.signal_variance * (1.0 - reduction.array()).max(0.0)).sqrt();
}

double GPSurrogate::log_marginal_likelihood() const {
    const double n = static_cast<double>(y_.size());
    const Vector e = (y_.array() - config_.mean).matrix();
    const double logdet = 2.0 * llt_.matrixLLT().diagonal().array().log().sum() + n * std::log(config_.signal_variance);
    return -0.5 * e.dot(alpha_) / config_.signal_variance - 0.5 * logdet -
           0.5 * n * std::log(2.0 * std::numbers::pi);
}

Vector GPSurrogate::loo_residuals() const {
    const Matrix inv = llt_.solve(Matrix::Identity(y_.size(), y_.size()));
    return alpha_.array() / inv.diagonal().array();
}

} // namespace slackal
