#include "slackal/problems.hpp"

#include "slackal/augmented_lagrangian.hpp"
#include "slackal/box_minimizer.hpp"
#include "slackal/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>
#include <tuple>

namespace slackal {

namespace functions {

namespace {
constexpr double pi = std::numbers::pi;

void need_dim(const Vector& x, int d, const char* name) {
    if (x.size() != d) {
        throw ShapeError(std::string(name) + ": expected " + std::to_string(d) + " inputs, got " +
                         std::to_string(x.size()));
    }
}
} // namespace

double f1(const Vector& x) { return x.sum(); }

double f2(const Vector& x) {
    need_dim(x, 2, "f2");
    const double x1 = x[0], x2 = x[1];
    const double u = 4.0 * x1 - 2.0, v = 4.0 * x2 - 2.0;
    const double a1 = 4.0 * x1 + 4.0 * x2 - 3.0;
    const double a = a1 * a1 * (75.0 - 56.0 * (x1 + x2) + 3.0 * u * u + 6.0 * u * v + 3.0 * v * v);
    const double b1 = 8.0 * x1 - 12.0 * x2 + 2.0;
    const double b = b1 * b1 * (-14.0 - 128.0 * x1 + 12.0 * u * u + 192.0 * x2 - 36.0 * u * v + 27.0 * v * v);
    return (std::log((1.0 + a) * (30.0 + b)) - 8.69) / 2.43;
}

double c1(const Vector& x) {
    need_dim(x, 2, "c1");
    return 0.5 * std::sin(2.0 * pi * (x[0] * x[0] - 2.0 * x[1])) + x[0] + 2.0 * x[1] - 1.5;
}

double c2(const Vector& x) {
    need_dim(x, 2, "c2");
    return -x[0] * x[0] - x[1] * x[1] + 1.5;
}

double c3(const Vector& x) {
    need_dim(x, 2, "c3");
    const double z1 = 15.0 * x[0] - 5.0;
    const double inner = 15.0 * x[1] - 5.0 / (4.0 * pi * pi) * z1 * z1 + 5.0 / pi * z1 - 6.0;
    return 15.0 - inner * inner - 10.0 * (1.0 - 1.0 / (8.0 * pi)) * std::cos(z1);
}

double c4(const Vector& x) {
    need_dim(x, 2, "c4");
    const double u = 2.0 * x[0] - 1.0, v = 2.0 * x[1] - 1.0;
    const double u2 = u * u;
    return 4.0 - (4.0 - 2.1 * u2 + u2 * u2 / 3.0) * u2 - u * v -
           16.0 * (x[1] * x[1] - x[1]) * v * v - 3.0 * std::sin(12.0 * (1.0 - x[0])) -
           3.0 * std::sin(12.0 * (1.0 - x[1]));
}

double c5(const Vector& x) {
    need_dim(x, 4, "c5");
    double sq = 0.0, cs = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double z = 3.0 * x[i] - 1.0;
        sq += z * z;
        cs += std::cos(2.0 * pi * z);
    }
    return 3.0 + 20.0 * std::exp(-0.2 * std::sqrt(0.25 * sq)) + std::exp(0.25 * cs) - 20.0 - std::exp(1.0);
}

const Vector& hartmann_C() {
    static const Vector C = (Vector(4) << 1.0, 1.2, 3.0, 3.2).finished();
    return C;
}

const Matrix& hartmann_a() {
    static const Matrix a = (Matrix(4, 4) << 10.00, 0.05, 3.00, 17.00,
                                             3.00, 10.00, 3.50, 8.00,
                                             17.00, 17.00, 1.70, 0.05,
                                             3.50, 0.10, 10.00, 10.00).finished();
    return a;
}

const Matrix& hartmann_p() {
    static const Matrix p = (Matrix(4, 4) << 0.131, 0.232, 0.234, 0.404,
                                             0.169, 0.413, 0.145, 0.882,
                                             0.556, 0.830, 0.352, 0.873,
                                             0.012, 0.373, 0.288, 0.574).finished();
    return p;
}

double c6(const Vector& x) {
    need_dim(x, 4, "c6");
    const Vector& C = hartmann_C();
    const Matrix& a = hartmann_a();
    const Matrix& p = hartmann_p();
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        double e = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double d = x[j] - p(j, i);
            e += a(j, i) * d * d;
        }
        s += C[i] * std::exp(-e);
    }
    return (-1.1 + s) / 0.8387;
}

} // namespace functions

namespace {

std::string lower_case(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
}

ScalarFunction negated(double (*fn)(const Vector&)) {
    return [fn](const Vector& x) { return -fn(x); };
}

void add_inequality(ProblemSpec& p, double (*fn)(const Vector&), const std::string& name) {
    if (p.options.printed_orientation) {
        p.constraints.emplace_back(fn);
        p.constraint_labels.push_back(name);
    } else {
        p.constraints.push_back(negated(fn));
        p.constraint_labels.push_back("-" + name);
    }
}

void add_equality(ProblemSpec& p, double (*fn)(const Vector&), const std::string& name) {
    p.constraints.emplace_back(fn);
    p.constraint_labels.push_back(name);
}

} // namespace

std::vector<std::string> problem_names() { return {"lsq", "gsbp", "lah"}; }

ProblemSpec make_problem(const std::string& name, const ProblemOptions& options) {
    ProblemSpec p;
    p.name = lower_case(name);
    p.options = options;
    p.options.gsbp_variant = lower_case(options.gsbp_variant);
    if (p.name == "lsq") {
        p.dim = 2;
        p.objective = functions::f1;
        p.objective_known = true;
        add_inequality(p, functions::c1, "c1");
        add_inequality(p, functions::c2, "c2");
        p.kinds = ConstraintKinds(2, 0);
        p.no_valid_ceiling = 2.0;
    } else if (p.name == "gsbp") {
        p.dim = 2;
        p.objective = functions::f2;
        p.objective_known = false;
        add_inequality(p, functions::c1, "c1");
        if (p.options.gsbp_variant == "prose") {
            add_equality(p, functions::c3, "c3");
            add_equality(p, functions::c4, "c4");
        } else if (p.options.gsbp_variant == "printed") {
            add_equality(p, functions::c2, "c2");
            add_equality(p, functions::c3, "c3");
        } else {
            throw ConfigError("unknown gsbp_variant '" + options.gsbp_variant + "' (expected prose or printed)");
        }
        p.kinds = ConstraintKinds(1, 2);
        p.no_valid_ceiling = 2.2;
    } else if (p.name == "lah") {
        p.dim = 4;
        p.objective = functions::f1;
        p.objective_known = true;
        add_inequality(p, functions::c5, "c5");
        add_equality(p, functions::c6, "c6");
        p.kinds = ConstraintKinds(1, 1);
        p.no_valid_ceiling = 4.0;
    } else {
        throw ConfigError("unknown problem '" + name + "' (expected lsq, gsbp or lah)");
    }
    p.bounds = Box::unit(p.dim);
    return p;
}

Evaluation evaluate(const ProblemSpec& problem, const Vector& x) {
    require_size(x, problem.dim, problem.name + " input");
    if (!x.allFinite() || !problem.bounds.contains(x, 0.0)) {
        throw DomainError(problem.name + ": input outside [0,1]^" + std::to_string(problem.dim));
    }
    Evaluation e;
    e.f = problem.objective(x);
    e.c.resize(static_cast<Eigen::Index>(problem.constraints.size()));
    for (std::size_t j = 0; j < problem.constraints.size(); ++j) e.c[static_cast<Eigen::Index>(j)] = problem.constraints[j](x);
    return e;
}

namespace {

double violation(const Vector& c, const ConstraintKinds& kinds, double epsilon) {
    double v = 0.0;
    for (int j = 0; j < kinds.size(); ++j) {
        const double excess = kinds.is_equality(j) ? std::abs(c[j]) - epsilon : c[j];
        if (excess > 0.0) v += excess * excess;
    }
    return v;
}

// Keeps the `capacity` smallest (key, point) pairs.
class BestK {
public:
    explicit BestK(std::size_t capacity) : capacity_(capacity) {}
    void offer(double key, const Vector& x) {
        if (heap_.size() < capacity_) {
            heap_.emplace(key, x);
        } else if (key < heap_.top().first) {
            heap_.pop();
            heap_.emplace(key, x);
        }
    }
    std::vector<Vector> points() {
        std::vector<std::pair<double, Vector>> items;
        while (!heap_.empty()) {
            items.push_back(heap_.top());
            heap_.pop();
        }
        std::reverse(items.begin(), items.end());
        std::vector<Vector> out;
        for (auto& it : items) out.push_back(it.second);
        return out;
    }

private:
    struct Cmp {
        bool operator()(const std::pair<double, Vector>& a, const std::pair<double, Vector>& b) const {
            return a.first < b.first;
        }
    };
    std::size_t capacity_;
    std::priority_queue<std::pair<double, Vector>, std::vector<std::pair<double, Vector>>, Cmp> heap_;
};

// Multiplier-method polish of min f s.t. validity, targeting a band slightly
// inside the tolerance so the result is valid at epsilon itself.
Vector polish_valid(const ProblemSpec& problem, const Vector& start, double epsilon) {
    constexpr double margin = 1e-7;
    const int m = problem.kinds.m();
    const int p = problem.kinds.p();
    const double band = std::max(0.0, epsilon - margin);
    auto shifted = [&](const Vector& x) {
        const Evaluation e = evaluate(problem, x);
        Vector G(m + 2 * p);
        for (int j = 0; j < m; ++j) G[j] = e.c[j] + margin;
        for (int k = 0; k < p; ++k) {
            G[m + 2 * k] = e.c[m + k] - band;
            G[m + 2 * k + 1] = -e.c[m + k] - band;
        }
        return std::make_pair(e.f, G);
    };
    Vector lambda = Vector::Zero(m + 2 * p);
    double rho = 1e-2;
    Vector x = start;
    double prev_violation = std::numeric_limits<double>::infinity();
    MinimizeOptions opts;
    opts.max_iterations = 200;
    opts.max_evaluations = 4000;
    opts.gradient_tolerance = 1e-10;
    opts.function_tolerance = 1e-15;
    for (int outer = 0; outer < 40; ++outer) {
        auto merit = [&](const Vector& z) {
            const auto [f, G] = shifted(z);
            const Vector shifted_g = (lambda * rho + G).cwiseMax(0.0);
            return f + (shifted_g.squaredNorm() - (lambda * rho).squaredNorm()) / (2.0 * rho);
        };
        const auto objective = with_numeric_gradient(merit, problem.bounds.lower, problem.bounds.upper, 1e-7);
        x = minimize_box(objective, x, problem.bounds.lower, problem.bounds.upper, opts).x;
        const Vector G = shifted(x).second;
        lambda = (lambda + G / rho).cwiseMax(0.0);
        const double viol = G.cwiseMax(0.0).maxCoeff();
        if (viol <= 0.0 && outer >= 3) break;
        if (viol > 0.25 * prev_violation) rho *= 0.1;
        prev_violation = viol;
    }
    return x;
}

std::mutex cache_mutex;
std::map<std::tuple<std::string, std::string, bool, int, double>, ReferenceOptimum> cache;

} // namespace

ReferenceOptimum reference_optimum(const ProblemSpec& problem, int grid_resolution, double epsilon) {
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be nonnegative");
    const int d = problem.dim;
    if (grid_resolution <= 0) grid_resolution = d <= 2 ? 1000 : 50;
    const int minimum = d <= 2 ? 100 : 40;
    if (grid_resolution < minimum) {
        throw DomainError("grid_resolution must be at least " + std::to_string(minimum) + " per axis");
    }
    const auto key = std::make_tuple(problem.name, problem.options.gsbp_variant,
                                     problem.options.printed_orientation, grid_resolution, epsilon);
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    BestK valid_seeds(12);
    BestK near_seeds(24);
    std::vector<int> idx(d, 0);
    Vector x(d);
    const double step = 1.0 / (grid_resolution - 1);
    bool any_valid = false;
    double best_f = std::numeric_limits<double>::infinity();
    Vector best_x;
    while (true) {
        for (int k = 0; k < d; ++k) x[k] = idx[k] * step;
        const Evaluation e = evaluate(problem, x);
        const double v = violation(e.c, problem.kinds, epsilon);
        if (v == 0.0) {
            any_valid = true;
            valid_seeds.offer(e.f, x);
            if (e.f < best_f) {
                best_f = e.f;
                best_x = x;
            }
        } else {
            near_seeds.offer(v, x);
        }
        int k = 0;
        while (k < d && ++idx[k] == grid_resolution) idx[k++] = 0;
        if (k == d) break;
    }

    std::vector<Vector> seeds = valid_seeds.points();
    for (Vector& s : near_seeds.points()) seeds.push_back(std::move(s));
    bool polished_valid = false;
    for (const Vector& s : seeds) {
        const Vector z = polish_valid(problem, s, epsilon);
        const Evaluation e = evaluate(problem, z);
        if (is_valid(e.c, problem.kinds, epsilon) && e.f < best_f) {
            best_f = e.f;
            best_x = z;
            polished_valid = true;
        }
    }
    if (!any_valid && !polished_valid) {
        throw InfeasibleGridError(problem.name + ": no valid point found on a " +
                                  std::to_string(grid_resolution) + "-per-axis grid");
    }

    std::ostringstream tag;
    tag << "grid" << grid_resolution << "^" << d << (polished_valid ? "+polish" : "") << " eps=" << epsilon;
    ReferenceOptimum ref{best_x, best_f, epsilon, tag.str()};
    std::lock_guard lock(cache_mutex);
    cache.emplace(key, ref);
    return ref;
}

} // namespace slackal
