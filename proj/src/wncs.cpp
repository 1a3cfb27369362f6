#include "slackal/wncs.hpp"

#include "slackal/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace slackal {

namespace {

using Complex = std::complex<double>;

// Components with positive weight only; the rest contribute nothing.
struct Prepared {
    std::vector<double> w;
    std::vector<double> delta;
    double mu = 0.0;
    double sd = 0.0;

    explicit Prepared(const WNCSSpec& spec) : mu(spec.gaussian_mean), sd(spec.gaussian_sd) {
        for (int j = 0; j < spec.size(); ++j) {
            if (spec.weights[j] > 0.0) {
                w.push_back(spec.weights[j]);
                delta.push_back(spec.noncentralities[j]);
            }
        }
    }

    [[nodiscard]] bool has_chi() const { return !w.empty(); }

    [[nodiscard]] double mean() const {
        double m = mu;
        for (std::size_t j = 0; j < w.size(); ++j) m += w[j] * (1.0 + delta[j]);
        return m;
    }

    // Left end of the real strip where the Laplace transform exists.
    [[nodiscard]] double strip_low() const {
        double wmax = 0.0;
        for (double x : w) wmax = std::max(wmax, x);
        return wmax > 0.0 ? -0.5 / wmax : -std::numeric_limits<double>::infinity();
    }

    // log E[exp(-z U)]
    [[nodiscard]] Complex log_laplace(Complex z) const {
        Complex r = -z * mu + 0.5 * z * z * sd * sd;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const Complex a = 1.0 + 2.0 * w[j] * z;
            r += -0.5 * std::log(a) - delta[j] * w[j] * z / a;
        }
        return r;
    }

    [[nodiscard]] double log_laplace(double c) const {
        double r = -c * mu + 0.5 * c * c * sd * sd;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double a = 1.0 + 2.0 * w[j] * c;
            r += -0.5 * std::log(a) - delta[j] * w[j] * c / a;
        }
        return r;
    }

    [[nodiscard]] double log_laplace_d1(double c) const {
        double r = -mu + c * sd * sd;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double a = 1.0 + 2.0 * w[j] * c;
            r += -w[j] / a - delta[j] * w[j] / (a * a);
        }
        return r;
    }

    [[nodiscard]] double log_laplace_d2(double c) const {
        double r = sd * sd;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double a = 1.0 + 2.0 * w[j] * c;
            const double w2 = w[j] * w[j];
            r += 2.0 * w2 / (a * a) + 4.0 * delta[j] * w2 / (a * a * a);
        }
        return r;
    }
};

// Root of a convex function's derivative inside (lo, hi) by Newton steps
// safeguarded with bisection. `d1` is increasing on the bracket, negative at
// lo and positive at hi.
template <class D1, class D2>
double safeguarded_newton(const D1& d1, const D2& d2, double lo, double hi) {
    double c = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double v = d1(c);
        if (!std::isfinite(v)) {
            // Only happens next to the singular end of the strip.
            lo = c;
            c = 0.5 * (lo + hi);
            continue;
        }
        if (v < 0.0) lo = c; else hi = c;
        const double curv = d2(c);
        double next = (curv > 0.0 && std::isfinite(curv)) ? c - v / curv : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - c) <= 1e-14 * std::max(1.0, std::abs(c)) || hi - lo <= 1e-15 * std::abs(c)) {
            return next;
        }
        c = next;
    }
    return c;
}

// Inverts e^{zt} L(z) / z^k along a ray leaving the real axis at the
// minimizer of the real-axis exponent. k = 1 gives the CDF, k = 2 the ramp.
double invert(const Prepared& p, double t, int k, const QuadratureConfig& quad) {
    const double expected = p.mean();
    const bool positive_side = !p.has_chi() || t < expected;

    auto h1 = [&](double c) { return t + p.log_laplace_d1(c) - k / c; };
    auto h2 = [&](double c) { return p.log_laplace_d2(c) + k / (c * c); };

    double c;
    if (positive_side) {
        double hi = 1.0;
        int guard = 0;
        while (h1(hi) < 0.0) {
            hi *= 2.0;
            if (++guard > 2000) throw AccuracyError("no saddle point on the positive axis", 1.0);
        }
        c = safeguarded_newton(h1, h2, 0.0, hi);
    } else {
        c = safeguarded_newton(h1, h2, p.strip_low(), 0.0);
    }

    const double h0 = c * t + p.log_laplace(c) - k * std::log(std::abs(c));
    const double scale = 1.0 / std::sqrt(h2(c));
    const double offset = t - p.mu;
    const double phi = offset > 0.0 ? 0.6 * std::numbers::pi
                     : offset < 0.0 ? 0.4 * std::numbers::pi
                                    : 0.5 * std::numbers::pi;
    const Complex dir = std::polar(1.0, phi);

    auto exponent = [&](double v) {
        const Complex z = c + v * scale * dir;
        return z * t + p.log_laplace(z) - static_cast<double>(k) * std::log(z);
    };
    // Integrand scaled by exp(-h0) so large exponents cannot overflow.
    auto integrand = [&](double v) {
        const Complex e = exponent(v) - h0;
        if (!(e.real() > -700.0)) return 0.0;
        const double r = (std::exp(e) * dir).imag();
        return std::isfinite(r) ? r : 0.0;
    };

    const double log_floor = std::log(quad.inversion_tolerance) - 25.3;
    double integral = 0.0;
    double a = 0.0;
    double width = 1.0;
    double tail = std::numeric_limits<double>::infinity();
    bool settled = false;
    for (int panel = 0; panel < quad.max_inversion_terms; ++panel) {
        const double b = a + width;
        integral += boost::math::quadrature::gauss<double, 10>::integrate(integrand, a, b);
        a = b;
        if (panel >= 1) width *= 1.5;
        const double log_tail = exponent(b).real() + std::log(scale);
        const double log_total = std::log(std::abs(integral) * scale / std::numbers::pi) + h0;
        tail = std::exp(log_tail);
        if (log_tail < std::max(log_total - 34.5, log_floor)) {
            settled = true;
            break;
        }
    }
    if (!settled) {
        throw AccuracyError("contour integral did not settle", tail);
    }

    const double value = std::exp(h0) * integral * scale / std::numbers::pi;
    if (positive_side) return value;
    return (k == 1 ? 1.0 : t - expected) + value;
}

double clamp_probability(double v) {
    if (!std::isfinite(v)) return 0.0;
    return std::clamp(v, 0.0, 1.0);
}

double trapezoid_cdf_integral(const WNCSSpec& spec, double a, double b,
                              const QuadratureConfig& quad) {
    int n = quad.node_count;
    double h = (b - a) / (n - 1);
    double sum = 0.5 * (cdf(spec, a, quad) + cdf(spec, b, quad));
    for (int i = 1; i < n - 1; ++i) sum += cdf(spec, a + i * h, quad);
    double estimate = sum * h;
    for (int r = 0; r < quad.max_refinements; ++r) {
        double mids = 0.0;
        for (int i = 0; i < n - 1; ++i) mids += cdf(spec, a + (i + 0.5) * h, quad);
        sum += mids;
        n = 2 * n - 1;
        h *= 0.5;
        const double refined = sum * h;
        const double change = std::abs(refined - estimate);
        estimate = refined;
        if (change <= quad.refine_tolerance * std::abs(refined)) break;
    }
    return estimate;
}

} // namespace

WNCSSpec::WNCSSpec(Vector w, Vector delta, double mean, double sd)
    : weights(std::move(w)), noncentralities(std::move(delta)), gaussian_mean(mean), gaussian_sd(sd) {
    validate();
}

void WNCSSpec::validate() const {
    if (weights.size() != noncentralities.size()) {
        throw ShapeError("WNCSSpec: weights and noncentralities differ in length");
    }
    for (int j = 0; j < size(); ++j) {
        if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) {
            throw DomainError("WNCSSpec: weights must be finite and nonnegative");
        }
        if (!(noncentralities[j] >= 0.0)) {
            throw DomainError("WNCSSpec: noncentralities must be nonnegative");
        }
        if (weights[j] > 0.0 && !std::isfinite(noncentralities[j])) {
            throw DomainError("WNCSSpec: noncentrality must be finite for a positive weight");
        }
    }
    if (!std::isfinite(gaussian_mean)) throw DomainError("WNCSSpec: gaussian_mean must be finite");
    if (!(gaussian_sd >= 0.0) || !std::isfinite(gaussian_sd)) {
        throw DomainError("WNCSSpec: gaussian_sd must be finite and nonnegative");
    }
}

double WNCSSpec::mean() const { return Prepared(*this).mean(); }

double WNCSSpec::variance() const {
    double v = gaussian_sd * gaussian_sd;
    for (int j = 0; j < size(); ++j) {
        if (weights[j] > 0.0) v += weights[j] * weights[j] * (2.0 + 4.0 * noncentralities[j]);
    }
    return v;
}

bool WNCSSpec::degenerate() const {
    return gaussian_sd == 0.0 && (weights.array() == 0.0).all();
}

void QuadratureConfig::validate() const {
    if (node_count < 16) throw DomainError("QuadratureConfig: node_count must be at least 16");
    if (!(inversion_tolerance > 0.0)) throw DomainError("QuadratureConfig: inversion_tolerance must be positive");
    if (max_inversion_terms < 1) throw DomainError("QuadratureConfig: max_inversion_terms must be positive");
    if (!(refine_tolerance > 0.0)) throw DomainError("QuadratureConfig: refine_tolerance must be positive");
    if (max_refinements < 0) throw DomainError("QuadratureConfig: max_refinements must be nonnegative");
}

double cdf(const WNCSSpec& spec, double t, const QuadratureConfig& quad) {
    const Prepared p(spec);
    if (!p.has_chi()) {
        if (p.sd == 0.0) return t >= p.mu ? 1.0 : 0.0;
        return normal_cdf((t - p.mu) / p.sd);
    }
    if (p.sd == 0.0 && t <= p.mu) return 0.0;
    return clamp_probability(invert(p, t, 1, quad));
}

double ramp_expectation(const WNCSSpec& spec, double t, const QuadratureConfig& quad) {
    const Prepared p(spec);
    if (!p.has_chi()) {
        if (p.sd == 0.0) return std::max(0.0, t - p.mu);
        const double z = (t - p.mu) / p.sd;
        return std::max(0.0, (t - p.mu) * normal_cdf(z) + p.sd * normal_pdf(z));
    }
    if (p.sd == 0.0 && t <= p.mu) return 0.0;
    const double v = invert(p, t, 2, quad);
    if (!std::isfinite(v)) return 0.0;
    return std::max(0.0, v);
}

double log_cdf_upper_bound(const WNCSSpec& spec, double t) {
    const Prepared p(spec);
    if (t >= p.mean()) return 0.0;
    if (p.sd == 0.0 && t <= p.mu) return -std::numeric_limits<double>::infinity();
    auto d1 = [&](double c) { return t + p.log_laplace_d1(c); };
    auto d2 = [&](double c) { return p.log_laplace_d2(c); };
    double hi = 1.0;
    int guard = 0;
    while (d1(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 2000) return -std::numeric_limits<double>::infinity();
    }
    const double c = safeguarded_newton(d1, d2, 0.0, hi);
    return std::min(0.0, c * t + p.log_laplace(c));
}

Vector sample(const WNCSSpec& spec, int count, std::uint64_t seed) {
    if (count < 1) throw DomainError("sample: count must be at least 1");
    spec.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector out(count);
    std::vector<double> shift(spec.size());
    for (int j = 0; j < spec.size(); ++j) shift[j] = std::sqrt(spec.noncentralities[j]);
    for (int i = 0; i < count; ++i) {
        double u = spec.gaussian_mean + spec.gaussian_sd * normal(rng);
        for (int j = 0; j < spec.size(); ++j) {
            const double z = normal(rng);
            if (spec.weights[j] > 0.0) {
                const double y = z + shift[j];
                u += spec.weights[j] * y * y;
            }
        }
        out[i] = u;
    }
    return out;
}

double ei_known_objective(const WNCSSpec& spec, double w_min, double rho,
                          const QuadratureConfig& quad) {
    spec.validate();
    quad.validate();
    if (!(rho > 0.0)) throw DomainError("ei_known_objective: rho must be positive");
    if (spec.gaussian_sd != 0.0) throw DomainError("ei_known_objective: spec has a Gaussian part");
    if (!(w_min >= 0.0)) return 0.0;
    const double lower = std::max(0.0, spec.gaussian_mean);
    if (w_min <= lower && !spec.degenerate()) return 0.0;
    if (log_cdf_upper_bound(spec, w_min) < std::log(plateau_probability)) return 0.0;
    if (!spec.degenerate() && cdf(spec, w_min, quad) < plateau_probability) return 0.0;
    double integral;
    if (quad.method == QuadratureMethod::Direct || spec.degenerate()) {
        integral = ramp_expectation(spec, w_min, quad);
    } else {
        integral = trapezoid_cdf_integral(spec, lower, w_min, quad);
    }
    return integral / (2.0 * rho);
}

double ei_unknown_objective(const WNCSSpec& spec, double w_tilde, double rho,
                            const QuadratureConfig& quad) {
    spec.validate();
    quad.validate();
    if (!(rho > 0.0)) throw DomainError("ei_unknown_objective: rho must be positive");
    if (!(spec.gaussian_sd > 0.0)) throw DomainError("ei_unknown_objective: spec has no Gaussian part");
    if (std::isnan(w_tilde)) return 0.0;
    if (log_cdf_upper_bound(spec, w_tilde) < std::log(plateau_probability)) return 0.0;
    if (cdf(spec, w_tilde, quad) < plateau_probability) return 0.0;
    if (quad.method == QuadratureMethod::Direct) {
        return ramp_expectation(spec, w_tilde, quad) / (2.0 * rho);
    }
    const double lower = spec.gaussian_mean - 3.0 * spec.gaussian_sd;
    if (w_tilde <= lower) return 0.0;
    return trapezoid_cdf_integral(spec, lower, w_tilde, quad) / (2.0 * rho);
}

} // namespace slackal
