#include "slackal/errors.hpp"
#include "slackal/gp_surrogate.hpp"
#include "slackal/lhs.hpp"
#include "slackal/problems.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace slackal;
using test_support::vec;

namespace {

Vector apply(const Matrix& X, double (*f)(const Vector&)) {
    Vector y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) y[i] = f(X.row(i).transpose());
    return y;
}

GPConfig fixed_config(int d, double l, double s2, double mean) {
    GPConfig c;
    c.lengthscales = Vector::Constant(d, l);
    c.signal_variance = s2;
    c.mean = mean;
    c.nugget = 1e-8;
    return c;
}

} // namespace

TEST_CASE("zero data gives a zero predictive mean") {
    Matrix X(2, 2);
    X << 0.1, 0.2, 0.8, 0.7;
    const GPSurrogate gp = GPSurrogate::fit(X, Vector::Zero(2), Box::unit(2));
    for (const Vector& x : {vec({0.0, 0.0}), vec({0.5, 0.5}), vec({1.0, 0.3})}) CHECK(gp.predict(x).mean == 0.0);
}

TEST_CASE("fitted models interpolate their data") {
    const Matrix X = latin_hypercube(20, 2, 3);
    for (auto f : {&functions::c1, &functions::c2, &functions::f2}) {
        const Vector y = apply(X, f);
        const GPSurrogate gp = GPSurrogate::fit(X, y, Box::unit(2));
        const double range = y.maxCoeff() - y.minCoeff();
        double worst = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const Prediction p = gp.predict(X.row(i).transpose());
            worst = std::max(worst, std::abs(p.mean - y[i]));
            CHECK(p.sd <= 10.0 * std::sqrt(gp.config().nugget * gp.config().signal_variance));
        }
        CHECK(worst <= 1e-6 * range);
    }
}

TEST_CASE("leave-one-out RMSE on c2 beats the sample standard deviation") {
    const Matrix X = latin_hypercube(20, 2, 17);
    const Vector y = apply(X, &functions::c2);
    const GPSurrogate gp = GPSurrogate::fit(X, y, Box::unit(2));
    const double rmse = std::sqrt(gp.loo_residuals().squaredNorm() / 20.0);
    const double sd = std::sqrt((y.array() - y.mean()).square().sum() / 19.0);
    CHECK(rmse < sd);
}

TEST_CASE("leave-one-out residuals match explicit refits at fixed hyperparameters") {
    const Matrix X = latin_hypercube(8, 2, 4);
    const Vector y = apply(X, &functions::c1);
    const GPConfig c = fixed_config(2, 0.4, 1.3, 0.2);
    const GPSurrogate gp = GPSurrogate::condition_on(X, y, Box::unit(2), c);
    const Vector loo = gp.loo_residuals();
    for (int i = 0; i < 8; ++i) {
        Matrix Xi(7, 2);
        Vector yi(7);
        for (int r = 0, k = 0; r < 8; ++r) {
            if (r == i) continue;
            Xi.row(k) = X.row(r);
            yi[k++] = y[r];
        }
        const GPSurrogate gi = GPSurrogate::condition_on(Xi, yi, Box::unit(2), c);
        CHECK(loo[i] == doctest::Approx(y[i] - gi.predict(X.row(i).transpose()).mean).epsilon(1e-6));
    }
}

TEST_CASE("prediction outside the bounds is a domain error") {
    Matrix X(3, 1);
    X << 0.0, 0.5, 1.0;
    const GPSurrogate gp = GPSurrogate::fit(X, vec({0.0, 1.0, 0.0}), Box::unit(1));
    CHECK_THROWS_AS((void)gp.predict(vec({1.5})), DomainError);
    CHECK_THROWS_AS((void)gp.predict(vec({0.5, 0.5})), ShapeError);
}

TEST_CASE("prediction far from the data reverts to the prior") {
    Matrix X(2, 2);
    X << 0.0, 0.0, 0.05, 0.0;
    const GPConfig c = fixed_config(2, 0.01, 2.5, 0.7);
    const GPSurrogate gp = GPSurrogate::condition_on(X, vec({3.0, -1.0}), Box::unit(2), c);
    const Prediction p = gp.predict(vec({1.0, 1.0}));
    CHECK(p.mean == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(p.sd == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
}

TEST_CASE("1-d GP on y = x matches closed-form algebra") {
    // Oracle: tests/oracle/gp_closed_form.py.
    Matrix X(2, 1);
    X << 0.0, 1.0;
    const GPSurrogate gp = GPSurrogate::condition_on(X, vec({0.0, 1.0}), Box::unit(1), fixed_config(1, 0.5, 1.0, 0.5));
    const Prediction lo = gp.predict(vec({0.25})), mid = gp.predict(vec({0.5})), hi = gp.predict(vec({0.75}));
    CHECK(mid.mean == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.sd == doctest::Approx(0.59325014289434238).epsilon(1e-9));
    CHECK(lo.mean == doctest::Approx(0.17742153810623873).epsilon(1e-9));
    CHECK(hi.mean == doctest::Approx(0.82257846189376127).epsilon(1e-9));
    CHECK(lo.sd == doctest::Approx(0.42225398319549398).epsilon(1e-9));
    CHECK((lo.mean - 0.5) == doctest::Approx(-(hi.mean - 0.5)).epsilon(1e-12));
    CHECK(lo.sd == doctest::Approx(hi.sd).epsilon(1e-12));
    CHECK(mid.mean >= 0.0);
    CHECK(mid.mean <= 1.0);
}

TEST_CASE("refit interpolates the new point") {
    const Matrix X = latin_hypercube(10, 2, 21);
    const GPSurrogate gp = GPSurrogate::fit(X, apply(X, &functions::c2), Box::unit(2));
    const Vector x_new = vec({0.33, 0.91});
    const GPSurrogate g2 = gp.refit_with(x_new, functions::c2(x_new));
    CHECK(g2.size() == 11);
    const Vector y2 = apply(X, &functions::c2);
    const double range = std::max(y2.maxCoeff(), functions::c2(x_new)) - std::min(y2.minCoeff(), functions::c2(x_new));
    CHECK(std::abs(g2.predict(x_new).mean - functions::c2(x_new)) <= 1e-6 * range);
    CHECK_THROWS_AS((void)gp.refit_with(X.row(3).transpose(), 0.0), DuplicateInputError);
    CHECK_THROWS_AS((void)gp.condition_with(X.row(3).transpose(), 0.0), DuplicateInputError);
}

TEST_CASE("conditioning on the predictive mean leaves the mean unchanged") {
    const Matrix X = latin_hypercube(10, 2, 8);
    const GPSurrogate gp = GPSurrogate::condition_on(X, apply(X, &functions::c1), Box::unit(2), fixed_config(2, 0.3, 0.8, 0.1));
    const Vector x_new = vec({0.61, 0.27});
    const double mu = gp.predict(x_new).mean;
    const GPSurrogate g2 = gp.condition_with(x_new, mu);
    CHECK(std::abs(g2.predict(x_new).mean - mu) <= 1e-8);
}

TEST_CASE("incremental conditioning agrees with a fresh fit at fixed hyperparameters") {
    const Matrix X = latin_hypercube(11, 2, 31);
    const Vector y = apply(X, &functions::f2);
    const GPConfig c = fixed_config(2, 0.35, 1.7, -0.2);
    const GPSurrogate ten = GPSurrogate::condition_on(X.topRows(10), y.head(10), Box::unit(2), c);
    const GPSurrogate grown = ten.condition_with(X.row(10).transpose(), y[10]);
    const GPSurrogate fresh = GPSurrogate::condition_on(X, y, Box::unit(2), c);
    for (const Vector& q : {vec({0.1, 0.9}), vec({0.5, 0.5}), vec({0.77, 0.12})}) {
        CHECK(grown.predict(q).mean == doctest::Approx(fresh.predict(q).mean).epsilon(1e-10));
        CHECK(grown.predict(q).sd == doctest::Approx(fresh.predict(q).sd).epsilon(1e-10));
    }
}

TEST_CASE("fit input validation") {
    Matrix X(3, 2);
    X << 0.1, 0.1, 0.5, 0.5, 0.1, 0.1;
    CHECK_THROWS_AS(GPSurrogate::fit(X, vec({1.0, 2.0, 3.0}), Box::unit(2)), DuplicateInputError);
    Matrix one(1, 2);
    one << 0.5, 0.5;
    CHECK_THROWS_AS(GPSurrogate::fit(one, vec({1.0}), Box::unit(2)), DomainError);
    Matrix out(2, 2);
    out << 0.5, 0.5, 1.5, 0.5;
    CHECK_THROWS_AS(GPSurrogate::fit(out, vec({1.0, 2.0}), Box::unit(2)), DomainError);
    Matrix ok(2, 2);
    ok << 0.5, 0.5, 0.2, 0.5;
    CHECK_THROWS_AS(GPSurrogate::fit(ok, vec({1.0, 2.0, 3.0}), Box::unit(2)), ShapeError);
    GPConfig bad = fixed_config(2, 0.3, 1.0, 0.0);
    bad.nugget = 1e-12;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = fixed_config(2, -0.3, 1.0, 0.0);
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("uncertainty is lowest at the data") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const Matrix X = latin_hypercube(6, 2, seed);
        const GPSurrogate gp = GPSurrogate::fit(X, apply(X, &functions::c4), Box::unit(2));
        // Point of a 41^2 grid maximizing the distance to the design.
        Vector far;
        double best = -1.0;
        for (int i = 0; i <= 40; ++i) {
            for (int j = 0; j <= 40; ++j) {
                const Vector q = vec({i / 40.0, j / 40.0});
                double dmin = 1e9;
                for (Eigen::Index r = 0; r < X.rows(); ++r) dmin = std::min(dmin, (X.row(r).transpose() - q).norm());
                if (dmin > best) {
                    best = dmin;
                    far = q;
                }
            }
        }
        const double sd_far = gp.predict(far).sd;
        for (Eigen::Index r = 0; r < X.rows(); ++r) CHECK(gp.predict(X.row(r).transpose()).sd <= sd_far);
    }
}

TEST_CASE("fits are bit-reproducible and never produce NaN") {
    const Matrix X = latin_hypercube(15, 4, 9);
    const Vector y = apply(X, &functions::c6);
    GPFitOptions opts;
    opts.seed = 123;
    const GPSurrogate a = GPSurrogate::fit(X, y, Box::unit(4), opts);
    const GPSurrogate b = GPSurrogate::fit(X, y, Box::unit(4), opts);
    CHECK(a.config().lengthscales == b.config().lengthscales);
    const Matrix Q = latin_hypercube(50, 4, 10);
    Vector ma, sa, mb, sb;
    a.predict(Q, ma, sa);
    b.predict(Q, mb, sb);
    CHECK(ma == mb);
    CHECK(sa == sb);
    CHECK(ma.allFinite());
    CHECK(sa.allFinite());
    for (Eigen::Index i = 0; i < Q.rows(); ++i) {
        const Prediction p = a.predict(Q.row(i).transpose());
        CHECK(p.mean == doctest::Approx(ma[i]).epsilon(1e-12));
        CHECK(p.sd >= 0.0);
    }
    CHECK(std::isfinite(a.log_marginal_likelihood()));
}
