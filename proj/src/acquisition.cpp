#include "slackal/acquisition.hpp"

#include "slackal/box_minimizer.hpp"
#include "slackal/errors.hpp"
#include "slackal/lhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace slackal {

namespace {

constexpr double duplicate_tolerance = 1e-8;
constexpr double fold_noncentrality = 1e16;

bool near_existing(const Vector& x, const Matrix& existing) {
    for (Eigen::Index i = 0; i < existing.rows(); ++i) {
        if ((existing.row(i).transpose() - x).cwiseAbs().maxCoeff() <= duplicate_tolerance) return true;
    }
    return false;
}

// Moments with an unknown objective but zero predictive sd behave like a
// known objective equal to the mean.
Moments effective(const Moments& m) {
    if (m.f_known || m.f_sd > 0.0) return m;
    Moments k = m;
    k.f_known = true;
    return k;
}

Score score_with(const Moments& m, const AcquisitionContext& ctx, AcquisitionKind kind,
                 const Matrix* normals) {
    Score s;
    switch (kind) {
    case AcquisitionKind::SlackAlEi:
        s.value = slack_al_ei(m, ctx.al_state, ctx.kinds, ctx.incumbent, ctx.quad);
        s.fallback = fallback_score(m, ctx.al_state, ctx.kinds, ctx.incumbent, ctx.fallback);
        break;
    case AcquisitionKind::OriginalAlEiMc: {
        const MonteCarloEI mc = original_al_ei_mc(m, ctx.al_state, ctx.kinds, ctx.incumbent, *normals);
        s.value = mc.ei;
        s.fallback = -mc.composite_mean;
        break;
    }
    case AcquisitionKind::Efi:
        s.value = efi(m, ctx.kinds, ctx.al_state.epsilon, ctx.incumbent);
        break;
    }
    if (!std::isfinite(s.value) || s.value < 0.0) s.value = 0.0;
    if (std::isnan(s.fallback)) s.fallback = -std::numeric_limits<double>::infinity();
    return s;
}

} // namespace

void AcquisitionContext::validate() const {
    if (static_cast<int>(constraint_models.size()) != kinds.size()) {
        throw ShapeError("one constraint surrogate per constraint is required");
    }
    for (const auto& c : constraint_models)
        if (!c) throw StateError("missing constraint surrogate");
    if (static_cast<bool>(objective_model) == static_cast<bool>(known_objective)) {
        throw StateError("exactly one of a known objective or an objective surrogate is required");
    }
    require_size(al_state.lambda, kinds.size(), "multipliers");
    al_state.validate();
    quad.validate();
    if (mc_samples < 100) throw DomainError("mc_samples must be at least 100");
}

Moments AcquisitionContext::moments(const Vector& x) const {
    Moments m;
    if (known_objective) {
        m.f_known = true;
        m.f_mean = known_objective(x);
    } else {
        const Prediction p = objective_model->predict(x);
        m.f_mean = p.mean;
        m.f_sd = p.sd;
    }
    const int k = static_cast<int>(constraint_models.size());
    m.c_mean.resize(k);
    m.c_sd.resize(k);
    for (int j = 0; j < k; ++j) {
        const Prediction p = constraint_models[j]->predict(x);
        m.c_mean[j] = p.mean;
        m.c_sd[j] = p.sd;
    }
    return m;
}

std::vector<Moments> AcquisitionContext::moments(const Matrix& X) const {
    const Eigen::Index n = X.rows();
    std::vector<Moments> out(static_cast<std::size_t>(n));
    const int k = static_cast<int>(constraint_models.size());
    Vector fm, fs;
    if (known_objective) {
        for (Eigen::Index i = 0; i < n; ++i) {
            out[i].f_known = true;
            out[i].f_mean = known_objective(X.row(i).transpose());
        }
    } else {
        objective_model->predict(X, fm, fs);
        for (Eigen::Index i = 0; i < n; ++i) {
            out[i].f_mean = fm[i];
            out[i].f_sd = fs[i];
        }
    }
    for (auto& m : out) {
        m.c_mean.resize(k);
        m.c_sd.resize(k);
    }
    for (int j = 0; j < k; ++j) {
        Vector cm, cs;
        constraint_models[j]->predict(X, cm, cs);
        for (Eigen::Index i = 0; i < n; ++i) {
            out[i].c_mean[j] = cm[i];
            out[i].c_sd[j] = cs[i];
        }
    }
    return out;
}

double ei_gaussian(double mu, double sigma, double f_min) {
    if (!(sigma > 0.0)) return std::max(0.0, f_min - mu);
    const double z = (f_min - mu) / sigma;
    return std::max(0.0, (f_min - mu) * normal_cdf(z) + sigma * normal_pdf(z));
}

WNCSSpec slack_al_spec(const Moments& m, const Vector& s, const ALState& state) {
    const int k = static_cast<int>(m.c_mean.size());
    require_size(s, k, "slacks");
    require_size(state.lambda, k, "multipliers");
    const Moments e = effective(m);
    WNCSSpec spec;
    spec.weights = Vector::Zero(k);
    spec.noncentralities = Vector::Zero(k);
    double shift = 0.0;
    for (int j = 0; j < k; ++j) {
        const double offset = m.c_mean[j] + state.lambda[j] * state.rho + s[j];
        const double sd = m.c_sd[j];
        const double delta = sd > 0.0 ? (offset / sd) * (offset / sd) : std::numeric_limits<double>::infinity();
        if (!(sd > 0.0) || !(delta <= fold_noncentrality)) {
            shift += offset * offset;
        } else {
            spec.weights[j] = sd * sd;
            spec.noncentralities[j] = delta;
        }
    }
    spec.gaussian_mean = shift;
    if (!e.f_known) {
        spec.gaussian_mean += 2.0 * state.rho * e.f_mean;
        spec.gaussian_sd = 2.0 * state.rho * e.f_sd;
    }
    return spec;
}

namespace {

double r_of_s(const Vector& s, const ALState& state) {
    const Vector alpha = state.lambda * state.rho + s;
    return state.lambda.dot(s) + (s.squaredNorm() - alpha.squaredNorm()) / (2.0 * state.rho);
}

} // namespace

double slack_al_w_min(const Moments& m, const Vector& s, const ALState& state, double y_min) {
    return 2.0 * state.rho * (y_min - m.f_mean - r_of_s(s, state));
}

double slack_al_ei_at(const Moments& m, const Vector& s, const ALState& state, double y_min,
                      const QuadratureConfig& quad) {
    const Moments e = effective(m);
    const WNCSSpec spec = slack_al_spec(e, s, state);
    if (e.f_known) {
        return ei_known_objective(spec, slack_al_w_min(e, s, state, y_min), state.rho, quad);
    }
    const double w_tilde = 2.0 * state.rho * (y_min - r_of_s(s, state));
    return ei_unknown_objective(spec, w_tilde, state.rho, quad);
}

double slack_al_ei(const Moments& m, const ALState& state, const ConstraintKinds& kinds, double y_min,
                   const QuadratureConfig& quad) {
    return slack_al_ei_at(m, optimal_slack(m.c_mean, state, kinds), state, y_min, quad);
}

double slack_al_ei(const Vector& x, const AcquisitionContext& ctx) {
    return slack_al_ei(ctx.moments(x), ctx.al_state, ctx.kinds, ctx.incumbent, ctx.quad);
}

double fallback_score(const Moments& m, const ALState& state, const ConstraintKinds& kinds, double y_min,
                      FallbackRule rule) {
    const Vector s = optimal_slack(m.c_mean, state, kinds);
    const double w_min = slack_al_w_min(m, s, state, y_min);
    if (rule == FallbackRule::WMin) return w_min;
    double expected_penalty = 0.0;
    for (Eigen::Index j = 0; j < m.c_mean.size(); ++j) {
        const double offset = m.c_mean[j] + state.lambda[j] * state.rho + s[j];
        expected_penalty += m.c_sd[j] * m.c_sd[j] + offset * offset;
    }
    return w_min - expected_penalty;
}

double fallback_score(const Vector& x, const AcquisitionContext& ctx) {
    return fallback_score(ctx.moments(x), ctx.al_state, ctx.kinds, ctx.incumbent, ctx.fallback);
}

Matrix mc_standard_normals(int samples, int constraints, std::uint64_t seed) {
    if (samples < 1) throw DomainError("samples must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix Z(samples, 1 + constraints);
    for (int i = 0; i < samples; ++i)
        for (int j = 0; j <= constraints; ++j) Z(i, j) = normal(rng);
    return Z;
}

MonteCarloEI original_al_ei_mc(const Moments& m, const ALState& state, const ConstraintKinds& kinds,
                               double y_min, const Matrix& normals) {
    const int k = kinds.size();
    require_size(m.c_mean, k, "constraint means");
    if (normals.cols() != 1 + k) throw ShapeError("normal draws have the wrong number of columns");
    const Eigen::Index n = normals.rows();
    double sum = 0.0, sum_sq = 0.0, mean_sum = 0.0;
    const double inv2rho = 1.0 / (2.0 * state.rho);
    for (Eigen::Index i = 0; i < n; ++i) {
        double y = m.f_mean + (m.f_known ? 0.0 : m.f_sd * normals(i, 0));
        double penalty = 0.0;
        for (int j = 0; j < k; ++j) {
            const double c = m.c_mean[j] + m.c_sd[j] * normals(i, j + 1);
            y += state.lambda[j] * c;
            const double v = kinds.is_equality(j) ? c : std::max(0.0, c);
            penalty += v * v;
        }
        y += penalty * inv2rho;
        mean_sum += y;
        const double imp = std::max(0.0, y_min - y);
        sum += imp;
        sum_sq += imp * imp;
    }
    MonteCarloEI r;
    const double dn = static_cast<double>(n);
    r.ei = sum / dn;
    r.composite_mean = mean_sum / dn;
    const double var = n > 1 ? std::max(0.0, (sum_sq - dn * r.ei * r.ei) / (dn - 1.0)) : 0.0;
    r.std_error = std::sqrt(var / dn);
    return r;
}

double original_al_ei_mc(const Vector& x, const AcquisitionContext& ctx, int samples, std::uint64_t seed) {
    if (samples < 100) throw DomainError("original_al_ei_mc needs at least 100 samples");
    const Matrix Z = mc_standard_normals(samples, ctx.kinds.size(), seed);
    return original_al_ei_mc(ctx.moments(x), ctx.al_state, ctx.kinds, ctx.incumbent, Z).ei;
}

double probability_valid(const Moments& m, const ConstraintKinds& kinds, double epsilon) {
    require_size(m.c_mean, kinds.size(), "constraint means");
    double prob = 1.0;
    for (int j = 0; j < kinds.size(); ++j) {
        const double mu = m.c_mean[j];
        const double sd = m.c_sd[j];
        double pj;
        if (kinds.is_equality(j)) {
            pj = sd > 0.0 ? normal_cdf((epsilon - mu) / sd) - normal_cdf((-epsilon - mu) / sd)
                          : (std::abs(mu) <= epsilon ? 1.0 : 0.0);
        } else {
            pj = sd > 0.0 ? normal_cdf(-mu / sd) : (mu <= 0.0 ? 1.0 : 0.0);
        }
        prob *= std::max(0.0, pj);
    }
    return prob;
}

double efi(const Moments& m, const ConstraintKinds& kinds, double epsilon, double f_min) {
    const double improvement =
        std::isfinite(f_min) ? ei_gaussian(m.f_mean, m.f_known ? 0.0 : m.f_sd, f_min) : 1.0;
    if (improvement == 0.0) return 0.0;
    return improvement * probability_valid(m, kinds, epsilon);
}

double efi(const Vector& x, const AcquisitionContext& ctx) {
    return efi(ctx.moments(x), ctx.kinds, ctx.al_state.epsilon, ctx.incumbent);
}

void ProposalConfig::validate() const {
    if (candidate_count < 10) throw DomainError("candidate_count must be at least 10");
    if (polish_budget < 1) throw DomainError("polish_budget must be positive");
}

bool Score::better_than(const Score& other) const {
    if (positive() != other.positive()) return positive();
    if (positive()) return value > other.value;
    return fallback > other.fallback;
}

Score score_point(const Vector& x, const AcquisitionContext& ctx, AcquisitionKind kind) {
    Matrix Z;
    if (kind == AcquisitionKind::OriginalAlEiMc) Z = mc_standard_normals(ctx.mc_samples, ctx.kinds.size(), ctx.mc_seed);
    return score_with(ctx.moments(x), ctx, kind, &Z);
}

Proposal best_candidate(const AcquisitionContext& ctx, const Matrix& candidates, AcquisitionKind kind,
                        const Matrix& existing) {
    ctx.validate();
    Matrix Z;
    if (kind == AcquisitionKind::OriginalAlEiMc) Z = mc_standard_normals(ctx.mc_samples, ctx.kinds.size(), ctx.mc_seed);

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
        if (!near_existing(candidates.row(i).transpose(), existing)) keep.push_back(i);
    }
    if (keep.empty()) throw StateError("every candidate duplicates an evaluated point");
    Matrix X(static_cast<Eigen::Index>(keep.size()), candidates.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = candidates.row(keep[i]);

    const std::vector<Moments> moments = ctx.moments(X);
    Proposal best;
    for (std::size_t i = 0; i < moments.size(); ++i) {
        const Score s = score_with(moments[i], ctx, kind, &Z);
        if (best.x.size() == 0 || s.better_than(best.score)) {
            best.x = X.row(static_cast<Eigen::Index>(i)).transpose();
            best.score = s;
        }
    }
    best.candidates_scored = static_cast<int>(moments.size());
    return best;
}

Proposal propose_next(const AcquisitionContext& ctx, const Box& bounds, const ProposalConfig& config,
                      AcquisitionKind kind, const Matrix& existing) {
    config.validate();
    const Matrix candidates = latin_hypercube(config.candidate_count, bounds, config.seed);
    Proposal best = best_candidate(ctx, candidates, kind, existing);
    if (!config.polish) return best;

    Matrix Z;
    if (kind == AcquisitionKind::OriginalAlEiMc) Z = mc_standard_normals(ctx.mc_samples, ctx.kinds.size(), ctx.mc_seed);
    const bool on_plateau = !best.score.positive();
    auto target = [&](const Vector& x) {
        const Score s = score_with(ctx.moments(bounds.clamp(x)), ctx, kind, &Z);
        const double v = on_plateau ? s.fallback : s.value;
        return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
    };
    const Vector span = bounds.upper - bounds.lower;
    const auto objective = with_numeric_gradient(target, bounds.lower, bounds.upper, 1e-6 * span.maxCoeff());
    MinimizeOptions opts;
    opts.max_iterations = config.polish_budget;
    opts.max_evaluations = config.polish_budget;
    opts.gradient_tolerance = 0.0;
    opts.function_tolerance = 1e-12;
    const MinimizeResult r = minimize_box(objective, best.x, bounds.lower, bounds.upper, opts);

    const Vector x = bounds.clamp(r.x);
    if (near_existing(x, existing)) return best;
    const Score s = score_with(ctx.moments(x), ctx, kind, &Z);
    if (s.better_than(best.score)) {
        best.x = x;
        best.score = s;
        best.polished = true;
    }
    return best;
}

} // namespace slackal
