#pragma once

#include "slackal/augmented_lagrangian.hpp"
#include "slackal/common.hpp"
#include "slackal/gp_surrogate.hpp"
#include "slackal/wncs.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace slackal {

// Predictive moments at one input. When the objective is known, f_mean holds
// f(x) and f_sd is 0.
struct Moments {
    double f_mean = 0.0;
    double f_sd = 0.0;
    bool f_known = false;
    Vector c_mean;
    Vector c_sd;
};

enum class AcquisitionKind { SlackAlEi, OriginalAlEiMc, Efi };

// Ranking of zero-EI points. CompositeMean uses w_min - E[W] =
// 2 rho (y_min - E[Y(x, s*)]), which carries the expected penalty; WMin uses
// w_min alone, which does not depend on the constraint surrogates because
// r(s) = -rho |lambda|^2 / 2 for every s.
enum class FallbackRule { CompositeMean, WMin };

struct AcquisitionContext {
    std::vector<std::shared_ptr<const GPSurrogate>> constraint_models;
    std::shared_ptr<const GPSurrogate> objective_model;  // null when the objective is known
    std::function<double(const Vector&)> known_objective;
    ALState al_state;
    ConstraintKinds kinds;
    // Composite incumbent for the AL acquisitions, best valid f for EFI
    // (+infinity when nothing valid has been seen).
    double incumbent = 0.0;
    QuadratureConfig quad;
    int mc_samples = 1000;
    std::uint64_t mc_seed = 0;
    FallbackRule fallback = FallbackRule::CompositeMean;

    void validate() const;
    [[nodiscard]] Moments moments(const Vector& x) const;
    [[nodiscard]] std::vector<Moments> moments(const Matrix& X) const;
};

// (f_min - mu) Phi(z) + sigma phi(z), or max(0, f_min - mu) when sigma = 0.
[[nodiscard]] double ei_gaussian(double mu, double sigma, double f_min);

// Distribution of the penalty part of the slack composite at slacks s; for an
// unknown objective the Gaussian part carries 2 rho Y_f(x). Components whose
// predictive sd is 0 are folded into the shift.
[[nodiscard]] WNCSSpec slack_al_spec(const Moments& m, const Vector& s, const ALState& state);

// 2 rho (y_min - f(x) - r(s)); for an unknown objective f(x) is replaced by
// its predictive mean.
[[nodiscard]] double slack_al_w_min(const Moments& m, const Vector& s, const ALState& state,
                                    double y_min);

// EI of the slack composite at explicit slacks s.
[[nodiscard]] double slack_al_ei_at(const Moments& m, const Vector& s, const ALState& state,
                                    double y_min, const QuadratureConfig& quad = {});

// EI at the optimal slacks computed from the constraint means.
[[nodiscard]] double slack_al_ei(const Moments& m, const ALState& state, const ConstraintKinds& kinds,
                                 double y_min, const QuadratureConfig& quad = {});
[[nodiscard]] double slack_al_ei(const Vector& x, const AcquisitionContext& ctx);

// Score ranking points where the EI is zero, at the optimal slacks; larger
// is better.
[[nodiscard]] double fallback_score(const Moments& m, const ALState& state, const ConstraintKinds& kinds,
                                    double y_min, FallbackRule rule = FallbackRule::CompositeMean);
[[nodiscard]] double fallback_score(const Vector& x, const AcquisitionContext& ctx);

// samples x (1 + m + p) standard normals; the first column drives Y_f.
[[nodiscard]] Matrix mc_standard_normals(int samples, int constraints, std::uint64_t seed);

struct MonteCarloEI {
    double ei = 0.0;
    double std_error = 0.0;
    double composite_mean = 0.0;
};

// Monte Carlo EI of the original (max-penalty) composite from given normals.
[[nodiscard]] MonteCarloEI original_al_ei_mc(const Moments& m, const ALState& state,
                                             const ConstraintKinds& kinds, double y_min,
                                             const Matrix& normals);
[[nodiscard]] double original_al_ei_mc(const Vector& x, const AcquisitionContext& ctx, int samples,
                                       std::uint64_t seed);

// Product of the probabilities that each constraint is satisfied; equalities
// use the band [-epsilon, epsilon].
[[nodiscard]] double probability_valid(const Moments& m, const ConstraintKinds& kinds, double epsilon);

// Expected improvement of the objective times probability_valid. With no
// valid incumbent (f_min = +inf) the improvement factor is 1.
[[nodiscard]] double efi(const Moments& m, const ConstraintKinds& kinds, double epsilon, double f_min);
[[nodiscard]] double efi(const Vector& x, const AcquisitionContext& ctx);

struct ProposalConfig {
    int candidate_count = 1000;
    bool polish = false;
    int polish_budget = 50;  // local-search evaluations, each with its difference gradient
    std::uint64_t seed = 0;

    void validate() const;
};

// Lexicographic score: positive acquisition values beat any zero value; zero
// values are ordered by the fallback.
struct Score {
    double value = 0.0;
    double fallback = -std::numeric_limits<double>::infinity();

    [[nodiscard]] bool positive() const { return value > 0.0; }
    [[nodiscard]] bool better_than(const Score& other) const;
};

[[nodiscard]] Score score_point(const Vector& x, const AcquisitionContext& ctx, AcquisitionKind kind);

struct Proposal {
    Vector x;
    Score score;
    int candidates_scored = 0;
    bool polished = false;
};

// Scores the rows of `candidates` (skipping any within 1e-8 of a row of
// `existing`) and returns the best; ties go to the earliest row.
[[nodiscard]] Proposal best_candidate(const AcquisitionContext& ctx, const Matrix& candidates,
                                      AcquisitionKind kind, const Matrix& existing);

// LHS candidate search, optionally followed by a bounded quasi-Newton polish
// of the best candidate on the acquisition (or on the fallback when the best
// acquisition value is zero). The polished point replaces the candidate only
// if it scores better.
[[nodiscard]] Proposal propose_next(const AcquisitionContext& ctx, const Box& bounds,
                                    const ProposalConfig& config, AcquisitionKind kind,
                                    const Matrix& existing);

} // namespace slackal
