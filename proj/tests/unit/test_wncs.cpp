#include "slackal/acquisition.hpp"
#include "slackal/errors.hpp"
#include "slackal/wncs.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace slackal;
using test_support::vec;

namespace {

// Draws U directly from its definition, independent of sample().
std::vector<double> direct_draws(const WNCSSpec& s, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& u : out) {
        u = s.gaussian_mean + (s.gaussian_sd > 0 ? s.gaussian_sd * z(rng) : 0.0);
        for (int j = 0; j < s.size(); ++j) {
            const double v = z(rng) + std::sqrt(s.noncentralities[j]);
            u += s.weights[j] * v * v;
        }
    }
    return out;
}

double mc_ramp(const std::vector<double>& u, double t) {
    double acc = 0.0;
    for (double x : u) acc += std::max(t - x, 0.0);
    return acc / static_cast<double>(u.size());
}

WNCSSpec random_spec(std::mt19937_64& rng, bool gaussian) {
    std::uniform_int_distribution<int> k(1, 5);
    std::uniform_real_distribution<double> w(0.01, 5.0), d(0.0, 25.0), gm(-3.0, 3.0), gs(0.1, 3.0);
    const int m = k(rng);
    Vector weights(m), deltas(m);
    for (int j = 0; j < m; ++j) {
        weights[j] = w(rng);
        deltas[j] = d(rng);
    }
    return gaussian ? WNCSSpec(weights, deltas, gm(rng), gs(rng)) : WNCSSpec(weights, deltas);
}

} // namespace

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(WNCSSpec(vec({-1.0}), vec({0.0})), DomainError);
    CHECK_THROWS_AS(WNCSSpec(vec({1.0}), vec({-0.5})), DomainError);
    CHECK_THROWS_AS(WNCSSpec(vec({1.0, 2.0}), vec({0.0})), ShapeError);
    CHECK_THROWS_AS(WNCSSpec(vec({1.0}), vec({0.0}), 0.0, -1.0), DomainError);
    const WNCSSpec s(vec({2.0, 0.5}), vec({1.0, 3.0}), 1.0, 2.0);
    CHECK(s.mean() == doctest::Approx(1.0 + 2.0 * 2.0 + 0.5 * 4.0));
    CHECK(s.variance() == doctest::Approx(4.0 + 4.0 * 2.0 * (1 + 2.0) + 0.25 * 2.0 * (1 + 6.0)));
    CHECK(WNCSSpec(Vector(0), Vector(0), 3.0, 0.0).degenerate());
    QuadratureConfig q;
    q.node_count = 15;
    CHECK_THROWS_AS(q.validate(), DomainError);
}

TEST_CASE("cdf examples") {
    CHECK(cdf(WNCSSpec(vec({1.0}), vec({0.0})), 0.0) == 0.0);
    CHECK(cdf(WNCSSpec(Vector(0), Vector(0), 0.0, 1.0), 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    // Monte Carlo oracle values (10^7 draws, tests/oracle/mc_oracles.py).
    CHECK(std::abs(cdf(WNCSSpec(vec({1.0}), vec({0.0})), 3.8415) - 0.9498582) <= 2e-3);
    CHECK(std::abs(cdf(WNCSSpec(vec({0.5, 2.0}), vec({1.0, 0.25})), 4.0) - 0.6939408) <= 2e-3);
}

TEST_CASE("cdf matches closed forms") {
    // chi2_1: P(Z^2 <= t) = erf(sqrt(t / 2)); noncentral: P(|Z + a| <= sqrt t).
    for (double t : {0.01, 0.5, 1.0, 3.8415, 10.0, 30.0})
        CHECK(cdf(WNCSSpec(vec({1.0}), vec({0.0})), t) == doctest::Approx(std::erf(std::sqrt(t / 2))).epsilon(1e-10));
    const double a = 2.0;
    for (double t : {0.1, 2.0, 9.0, 25.0}) {
        const double r = std::sqrt(t);
        const double expect = normal_cdf(r - a) - normal_cdf(-r - a);
        CHECK(cdf(WNCSSpec(vec({1.0}), vec({a * a})), t) == doctest::Approx(expect).epsilon(1e-9));
    }
    // Scaled chi2_2 is exponential: P(3 (Z1^2 + Z2^2) <= t) = 1 - exp(-t / 6).
    for (double t : {0.2, 3.0, 12.0})
        CHECK(cdf(WNCSSpec(vec({3.0, 3.0}), vec({0.0, 0.0})), t) == doctest::Approx(1 - std::exp(-t / 6)).epsilon(1e-10));
}

TEST_CASE("sampler moments and determinism") {
    const Vector a = sample(WNCSSpec(vec({1.0}), vec({0.0})), 1000000, 11);
    CHECK(std::abs(a.mean() - 1.0) <= 0.01);
    const Vector b = sample(WNCSSpec(vec({1.0}), vec({4.0})), 1000000, 12);
    CHECK(std::abs(b.mean() - 5.0) <= 0.02);
    CHECK(sample(WNCSSpec(vec({1.0, 2.0}), vec({0.5, 0.1}), 1.0, 0.3), 100, 5) ==
          sample(WNCSSpec(vec({1.0, 2.0}), vec({0.5, 0.1}), 1.0, 0.3), 100, 5));
    CHECK_THROWS((void)sample(WNCSSpec(vec({1.0}), vec({0.0})), 0, 1));
}

TEST_CASE("sampler empirical cdf agrees with the inversion") {
    const WNCSSpec s(vec({0.5, 2.0, 0.8}), vec({1.0, 0.25, 3.0}), 0.5, 0.7);
    const int n = 1000000;
    Vector u = sample(s, n, 99);
    std::sort(u.begin(), u.end());
    const double bound = 3.0 * 1.36 / std::sqrt(static_cast<double>(n));
    for (int q = 1; q <= 10; ++q) {
        const double t = u[static_cast<Eigen::Index>(q * n / 11)];
        const double emp = static_cast<double>(std::upper_bound(u.begin(), u.end(), t) - u.begin()) / n;
        CHECK(std::abs(emp - cdf(s, t)) <= bound);
    }
}

TEST_CASE("known-objective EI examples") {
    const WNCSSpec s(vec({0.3, 0.7}), vec({0.5, 1.5}));
    CHECK(ei_known_objective(s, -1.0, 0.5) == 0.0);
    // Monte Carlo oracle 2.990628163 (se 5e-4).
    CHECK(test_support::close_rel(ei_known_objective(s, 5.0, 0.5), 2.990628163, 0.01));
    // Near point mass at w0 = 2: weight 1e-10 with delta 2e10.
    const WNCSSpec point(vec({1e-10}), vec({2e10}));
    CHECK(ei_known_objective(point, 5.0, 0.5) == doctest::Approx((5.0 - 2.0) / 1.0).epsilon(1e-6));
    // Exact point mass.
    const WNCSSpec exact(Vector::Zero(2), Vector::Zero(2), 2.0, 0.0);
    CHECK(ei_known_objective(exact, 5.0, 0.25) == doctest::Approx(3.0 / 0.5));
    CHECK_THROWS_AS((void)ei_known_objective(WNCSSpec(vec({1.0}), vec({0.0}), 0.0, 1.0), 1.0, 1.0), DomainError);
}

TEST_CASE("unknown-objective EI examples") {
    // Reduction to Gaussian EI: no constraint part, U = 2 rho Y_f.
    const double rho = 0.3, mu = 0.4, sigma = 0.9, y_min = 0.7;
    const WNCSSpec g(Vector(0), Vector(0), 2 * rho * mu, 2 * rho * sigma);
    CHECK(std::abs(ei_unknown_objective(g, 2 * rho * y_min, rho) - ei_gaussian(mu, sigma, y_min)) <= 1e-4);
    const WNCSSpec mixed(vec({0.4, 0.9}), vec({2.0, 0.3}), 1.5, 0.8);
    // Monte Carlo oracle 0.9067377371 (se 3.2e-4).
    CHECK(test_support::close_rel(ei_unknown_objective(mixed, 4.0, 0.5), 0.9067377371, 0.01));
    QuadratureConfig trap;
    trap.method = QuadratureMethod::Trapezoid;
    const double L = 1.5 - 3.0 * 0.8;
    CHECK(ei_unknown_objective(mixed, -1.0, 0.5, trap) == 0.0);
    CHECK(ei_unknown_objective(mixed, L, 0.5, trap) == 0.0);
    CHECK(ei_unknown_objective(mixed, L + 0.05, 0.5, trap) > 0.0);
    CHECK(test_support::close_rel(ei_unknown_objective(mixed, 4.0, 0.5, trap), 0.9067377371, 0.01));
    CHECK_THROWS_AS((void)ei_unknown_objective(WNCSSpec(vec({1.0}), vec({0.0})), 1.0, 1.0), DomainError);
}

TEST_CASE("direct and trapezoid routes agree") {
    QuadratureConfig trap;
    trap.method = QuadratureMethod::Trapezoid;
    const WNCSSpec s(vec({0.3, 0.7, 1.1}), vec({0.5, 1.5, 0.0}));
    for (double w : {0.5, 2.0, 6.0})
        CHECK(ei_known_objective(s, w, 0.7, trap) == doctest::Approx(ei_known_objective(s, w, 0.7)).epsilon(1e-5));
}

TEST_CASE("inversion that cannot settle reports its achieved bound") {
    QuadratureConfig q;
    q.max_inversion_terms = 1;
    q.inversion_tolerance = 1e-14;
    const WNCSSpec s(Vector::Constant(3, 1.0), Vector::Constant(3, 2.0));
    try {
        (void)cdf(s, 4.0, q);
        FAIL("expected AccuracyError");
    } catch (const AccuracyError& e) {
        CHECK(e.achieved_bound() > 0.0);
    }
}

TEST_CASE("cdf is monotone, bounded and has the right limits") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 40; ++rep) {
        const WNCSSpec s = random_spec(rng, rep % 2 == 1);
        const double scale = std::abs(s.mean()) + 10.0 * std::sqrt(s.variance());
        double prev = -1.0;
        for (int i = 0; i <= 60; ++i) {
            const double t = s.mean() + (i / 30.0 - 1.0) * 3.0 * std::sqrt(s.variance());
            const double p = cdf(s, t);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            CHECK(p + 1e-9 >= prev);
            prev = p;
        }
        CHECK(cdf(s, -10.0 * scale) <= 1e-6);
        CHECK(cdf(s, 10.0 * scale) >= 1.0 - 1e-6);
    }
}

TEST_CASE("EI is nondecreasing in w_min and its slope is cdf / 2 rho") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 20; ++rep) {
        const bool gaussian = rep % 2 == 1;
        const WNCSSpec s = random_spec(rng, gaussian);
        const double rho = 0.25 + 0.1 * rep;
        auto ei = [&](double w) { return gaussian ? ei_unknown_objective(s, w, rho) : ei_known_objective(s, w, rho); };
        const double sd = std::sqrt(s.variance());
        double prev = 0.0;
        for (int i = 0; i <= 20; ++i) {
            const double w = std::max(0.0, s.mean() + (i / 10.0 - 1.0) * 2.0 * sd);
            const double e = ei(w);
            CHECK(e >= prev - 1e-12);
            prev = e;
        }
        const double w = s.mean() + 0.3 * sd, h = 1e-4 * sd;
        const double slope = (ei(w + h) - ei(w - h)) / (2 * h);
        CHECK(slope == doctest::Approx(cdf(s, w) / (2 * rho)).epsilon(1e-4));
    }
}

TEST_CASE("EI matches Monte Carlo on random specs") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> z(-0.5, 2.0);
    int worst_rep = -1;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const bool gaussian = rep % 2 == 1;
        const WNCSSpec s = random_spec(rng, gaussian);
        const double rho = 0.5;
        const double w = std::max(0.05, s.mean() + z(rng) * std::sqrt(s.variance()));
        const double ei = gaussian ? ei_unknown_objective(s, w, rho) : ei_known_objective(s, w, rho);
        const double mc = mc_ramp(direct_draws(s, 1000000, 1000 + static_cast<std::uint64_t>(rep)), w) / (2 * rho);
        const double rel = std::abs(ei - mc) / std::max(mc, 1e-8);
        if (rel > worst) {
            worst = rel;
            worst_rep = rep;
        }
        CHECK(rel <= 0.02);
    }
    MESSAGE("worst relative EI error " << worst << " at spec " << worst_rep);
}
