#include "slackal/box_minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slackal {

namespace {

Vector project(const Vector& x, const Vector& lower, const Vector& upper) {
    return x.cwiseMax(lower).cwiseMin(upper);
}

// Zero the gradient components that would push a bound-active variable out.
Vector projected_gradient(const Vector& x, const Vector& g, const Vector& lower,
                          const Vector& upper) {
    Vector pg = g;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if ((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0)) pg[i] = 0.0;
    }
    return pg;
}

} // namespace

MinimizeResult minimize_box(const ObjectiveWithGradient& objective, const Vector& start,
                            const Vector& lower, const Vector& upper,
                            const MinimizeOptions& options) {
    const Eigen::Index n = start.size();
    MinimizeResult result;
    result.x = project(start, lower, upper);

    Vector g(n);
    double f = objective(result.x, &g);
    result.evaluations = 1;
    if (!std::isfinite(f)) {
        result.value = f;
        return result;
    }

    Matrix h_inv = Matrix::Identity(n, n);
    bool fresh_hessian = true;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.iterations = iter + 1;
        Vector pg = projected_gradient(result.x, g, lower, upper);
        if (pg.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        Vector direction = Vector::Zero(n);
        {
            std::vector<Eigen::Index> free;
            for (Eigen::Index i = 0; i < n; ++i)
                if (pg[i] != 0.0) free.push_back(i);
            for (Eigen::Index a : free) {
                double s = 0.0;
                for (Eigen::Index b : free) s -= h_inv(a, b) * g[b];
                direction[a] = s;
            }
        }
        if (direction.dot(pg) >= 0.0) {
            h_inv.setIdentity();
            fresh_hessian = true;
            direction = -pg;
        }

        double step = 1.0;
        if (fresh_hessian) step = std::min(1.0, 1.0 / std::max(direction.norm(), 1e-300));

        bool accepted = false;
        Vector x_new, g_new(n);
        double f_new = 0.0;
        for (int backtrack = 0; backtrack < 40; ++backtrack) {
            if (result.evaluations >= options.max_evaluations) break;
            x_new = project(result.x + step * direction, lower, upper);
            const Vector dx = x_new - result.x;
            if (dx.lpNorm<Eigen::Infinity>() == 0.0) break;
            f_new = objective(x_new, &g_new);
            ++result.evaluations;
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(dx)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }

        if (!accepted) {
            if (fresh_hessian || result.evaluations >= options.max_evaluations) break;
            h_inv.setIdentity();
            fresh_hessian = true;
            continue;
        }

        const Vector s = x_new - result.x;
        const Vector y = g_new - g;
        const double sy = s.dot(y);
        const double f_old = f;
        result.x = x_new;
        f = f_new;
        g = g_new;

        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh_hessian) {
                h_inv *= sy / y.squaredNorm();
            }
            const double rho = 1.0 / sy;
            const Vector hy = h_inv * y;
            h_inv += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) -
                     rho * (hy * s.transpose() + s * hy.transpose());
            fresh_hessian = false;
        }

        if (std::abs(f_old - f) <= options.function_tolerance * (1.0 + std::abs(f))) {
            result.converged = true;
            break;
        }
        if (result.evaluations >= options.max_evaluations) break;
    }
    result.value = f;
    return result;
}

ObjectiveWithGradient with_numeric_gradient(std::function<double(const Vector&)> f,
                                            const Vector& lower, const Vector& upper,
                                            double relative_step) {
    return [f = std::move(f), lower, upper, relative_step](const Vector& x, Vector* grad) {
        const double fx = f(x);
        if (grad != nullptr) {
            grad->resize(x.size());
            Vector probe = x;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const double h = relative_step * std::max(1.0, std::abs(x[i]));
                const double up = std::min(x[i] + h, upper[i]);
                const double down = std::max(x[i] - h, lower[i]);
                probe[i] = up;
                const double f_up = (up == x[i]) ? fx : f(probe);
                probe[i] = down;
                const double f_down = (down == x[i]) ? fx : f(probe);
                probe[i] = x[i];
                (*grad)[i] = (up > down) ? (f_up - f_down) / (up - down) : 0.0;
            }
        }
        return fx;
    };
}

} // namespace slackal
