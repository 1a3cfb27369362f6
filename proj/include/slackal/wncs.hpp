#pragma once

#include "slackal/common.hpp"

#include <cstdint>

namespace slackal {

// U = gaussian_mean + gaussian_sd * Z0 + sum_j weights_j * chi2(1, noncentralities_j)
// with independent components. Components with weight 0 contribute nothing.
struct WNCSSpec {
    Vector weights;
    Vector noncentralities;
    double gaussian_mean = 0.0;
    double gaussian_sd = 0.0;

    WNCSSpec() = default;
    WNCSSpec(Vector w, Vector delta, double mean = 0.0, double sd = 0.0);

    // Throws DomainError/ShapeError when the invariants do not hold.
    void validate() const;

    [[nodiscard]] int size() const { return static_cast<int>(weights.size()); }
    [[nodiscard]] double mean() const;
    [[nodiscard]] double variance() const;
    [[nodiscard]] bool degenerate() const;
};

enum class QuadratureMethod {
    // Closed-form ramp E[(t - U)+] from a single contour integral.
    Direct,
    // Composite trapezoid over the CDF with node doubling; slow reference route.
    Trapezoid,
};

struct QuadratureConfig {
    int node_count = 1000;
    double inversion_tolerance = 1e-6;
    int max_inversion_terms = 400;  // quadrature panels along the inversion contour
    QuadratureMethod method = QuadratureMethod::Direct;
    double refine_tolerance = 1e-6;
    int max_refinements = 4;

    void validate() const;
};

// P(U <= t), clamped to [0, 1]. Throws AccuracyError when the contour
// integral does not settle within max_inversion_terms panels.
[[nodiscard]] double cdf(const WNCSSpec& spec, double t, const QuadratureConfig& quad = {});

// E[(t - U)+] = integral of cdf over (-inf, t].
[[nodiscard]] double ramp_expectation(const WNCSSpec& spec, double t,
                                      const QuadratureConfig& quad = {});

// Chernoff bound: log P(U <= t) <= min_{c>0} (c t + log E[exp(-c U)]).
[[nodiscard]] double log_cdf_upper_bound(const WNCSSpec& spec, double t);

[[nodiscard]] Vector sample(const WNCSSpec& spec, int count, std::uint64_t seed);

// (1/2rho) * integral_0^{w_min} cdf(t) dt, zero when w_min < 0. `spec` must
// have gaussian_sd = 0.
[[nodiscard]] double ei_known_objective(const WNCSSpec& spec, double w_min, double rho,
                                        const QuadratureConfig& quad = {});

// (1/2rho) * E[(w_tilde - U)+] for a spec with a Gaussian part. The direct
// route integrates over the whole real line; the trapezoid route starts at
// gaussian_mean - 3 gaussian_sd and returns 0 when w_tilde lies below it.
[[nodiscard]] double ei_unknown_objective(const WNCSSpec& spec, double w_tilde, double rho,
                                          const QuadratureConfig& quad = {});

// Plateau cutoff on P(U <= t) below which EI is reported as exactly zero.
inline constexpr double plateau_probability = 1e-12;

} // namespace slackal
