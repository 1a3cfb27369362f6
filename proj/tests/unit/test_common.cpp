#include "slackal/box_minimizer.hpp"
#include "slackal/common.hpp"
#include "slackal/errors.hpp"
#include "slackal/lhs.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace slackal;
using test_support::vec;

TEST_CASE("box maps between unit and scaled coordinates") {
    Box b{vec({-1.0, 2.0}), vec({1.0, 6.0})};
    const Vector x = b.from_unit(vec({0.25, 0.5}));
    CHECK(x[0] == doctest::Approx(-0.5));
    CHECK(x[1] == doctest::Approx(4.0));
    CHECK((b.to_unit(x) - vec({0.25, 0.5})).norm() < 1e-15);
    CHECK(b.contains(vec({1.0, 2.0})));
    CHECK_FALSE(b.contains(vec({1.1, 2.0})));
    CHECK_FALSE(b.contains(vec({0.0})));
    CHECK(b.clamp(vec({5.0, 0.0})) == vec({1.0, 2.0}));
}

TEST_CASE("constraint kinds keep inequalities first") {
    ConstraintKinds k(2, 1);
    CHECK(k.size() == 3);
    CHECK_FALSE(k.is_equality(1));
    CHECK(k.is_equality(2));
    CHECK(ConstraintKinds({ConstraintKind::Inequality, ConstraintKind::Equality}) == ConstraintKinds(1, 1));
    CHECK_THROWS_AS(ConstraintKinds({ConstraintKind::Equality, ConstraintKind::Inequality}), ShapeError);
    CHECK_THROWS_AS(ConstraintKinds(-1, 0), ShapeError);
}

TEST_CASE("normal pdf and cdf") {
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(-3.0) == doctest::Approx(0.0013498980316300946).epsilon(1e-12));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("latin hypercube visits every stratum once per axis") {
    const int n = 17, d = 3;
    const Matrix X = latin_hypercube(n, d, 42);
    REQUIRE(X.rows() == n);
    REQUIRE(X.cols() == d);
    for (int j = 0; j < d; ++j) {
        std::set<int> strata;
        for (int i = 0; i < n; ++i) {
            CHECK(X(i, j) >= 0.0);
            CHECK(X(i, j) < 1.0);
            strata.insert(static_cast<int>(std::floor(X(i, j) * n)));
        }
        CHECK(strata.size() == static_cast<std::size_t>(n));
    }
}

TEST_CASE("latin hypercube is deterministic per seed and scales to the box") {
    CHECK(latin_hypercube(8, 2, 7) == latin_hypercube(8, 2, 7));
    CHECK(latin_hypercube(8, 2, 7) != latin_hypercube(8, 2, 8));
    Box b{vec({10.0, -1.0}), vec({20.0, 1.0})};
    const Matrix X = latin_hypercube(8, b, 3);
    for (int i = 0; i < 8; ++i) CHECK(b.contains(X.row(i).transpose()));
    CHECK_THROWS(latin_hypercube(0, 2, 1));
}

TEST_CASE("projected BFGS finds a bound-constrained quadratic minimum") {
    // Unconstrained minimum at (2, -0.5); the box cuts the first coordinate at 1.
    auto f = [](const Vector& x, Vector* g) {
        if (g) *g = vec({2.0 * (x[0] - 2.0), 8.0 * (x[1] + 0.5)});
        return (x[0] - 2.0) * (x[0] - 2.0) + 4.0 * (x[1] + 0.5) * (x[1] + 0.5);
    };
    const MinimizeResult r = minimize_box(f, vec({0.0, 0.5}), vec({-1.0, -1.0}), vec({1.0, 1.0}));
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("projected BFGS minimizes Rosenbrock inside the box") {
    auto f = [](const Vector& x, Vector* g) {
        const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
        if (g) *g = vec({-2.0 * a - 400.0 * x[0] * b, 200.0 * b});
        return a * a + 100.0 * b * b;
    };
    MinimizeOptions opts;
    opts.max_iterations = 500;
    opts.max_evaluations = 5000;
    const MinimizeResult r = minimize_box(f, vec({-1.2, 1.0}), vec({-2.0, -2.0}), vec({2.0, 2.0}), opts);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("numeric gradient matches the analytic one and respects the evaluation cap") {
    auto f = [](const Vector& x) { return std::sin(x[0]) * std::exp(x[1]); };
    const auto fg = with_numeric_gradient(f, vec({0.0, 0.0}), vec({1.0, 1.0}));
    Vector g;
    fg(vec({0.3, 0.7}), &g);
    CHECK(g[0] == doctest::Approx(std::cos(0.3) * std::exp(0.7)).epsilon(1e-7));
    CHECK(g[1] == doctest::Approx(std::sin(0.3) * std::exp(0.7)).epsilon(1e-7));
    // One-sided at a bound.
    fg(vec({0.0, 1.0}), &g);
    CHECK(g[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-5));

    int calls = 0;
    auto counted = [&](const Vector& x, Vector* grad) {
        ++calls;
        return fg(x, grad);
    };
    MinimizeOptions opts;
    opts.max_evaluations = 7;
    const MinimizeResult r = minimize_box(counted, vec({0.5, 0.5}), vec({0.0, 0.0}), vec({1.0, 1.0}), opts);
    CHECK(calls <= 7);
    CHECK(r.evaluations == calls);
}
