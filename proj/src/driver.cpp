#include "slackal/driver.hpp"

#include "slackal/errors.hpp"
#include "slackal/lhs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

namespace slackal {

std::string to_string(Method method) {
    switch (method) {
    case Method::SlackAlEi: return "slack-al-ei";
    case Method::SlackAlEiOptim: return "slack-al-ei-optim";
    case Method::OrigAlEiMc: return "orig-al-ei-mc";
    case Method::Efi: return "efi";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    for (Method m : all_methods())
        if (to_string(m) == name) return m;
    throw ConfigError("unknown method '" + name + "' (expected slack-al-ei, slack-al-ei-optim, orig-al-ei-mc or efi)");
}

std::vector<Method> all_methods() {
    return {Method::SlackAlEi, Method::SlackAlEiOptim, Method::OrigAlEiMc, Method::Efi};
}

void RunConfig::validate(const ProblemSpec& problem_spec) const {
    if (n0 < problem_spec.dim + 1) {
        throw ConfigError("n0 must be at least d + 1 = " + std::to_string(problem_spec.dim + 1));
    }
    if (budget < n0) throw ConfigError("budget must be at least n0");
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
    if (mc_samples < 100) throw ConfigError("mc_samples must be at least 100");
    proposal.validate();
    quad.validate();
}

bool TraceRecord::all_valid() const {
    return std::all_of(valid.begin(), valid.end(), [](bool b) { return b; });
}

namespace {

using Clock = std::chrono::steady_clock;

// Fits one surrogate; on failure retries once with a larger nugget range.
std::shared_ptr<const GPSurrogate> fit_model(const Matrix& X, const Vector& y, const Box& bounds,
                                             GPFitOptions options) {
    try {
        return std::make_shared<const GPSurrogate>(GPSurrogate::fit(X, y, bounds, options));
    } catch (const FitError&) {
        options.initial_nugget = std::max(options.initial_nugget * 100.0, 1e-6);
        options.max_nugget = std::max(options.max_nugget * 100.0, 1e-2);
        return std::make_shared<const GPSurrogate>(GPSurrogate::fit(X, y, bounds, options));
    }
}

} // namespace

Trace run(const RunConfig& config) {
    const ProblemSpec problem = make_problem(config.problem, config.problem_options);
    config.validate(problem);
    const ConstraintKinds& kinds = problem.kinds;
    const auto start = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    Trace trace;
    trace.problem = problem.name;
    trace.method = to_string(config.method);
    trace.seed = config.seed;
    trace.n0 = config.n0;
    trace.budget = config.budget;
    trace.epsilon = config.epsilon;
    trace.dim = problem.dim;
    trace.kinds = kinds;
    trace.constraint_labels = problem.constraint_labels;

    const bool uses_al = config.method != Method::Efi;
    const bool slack = config.method == Method::SlackAlEi || config.method == Method::SlackAlEiOptim;

    EvalHistory history(problem.dim, kinds.size());
    history.n0 = config.n0;
    double best_valid_f = std::numeric_limits<double>::infinity();

    auto append = [&](const Vector& x, const Evaluation& e, bool initial) {
        history.append(x, e.f, e.c);
        TraceRecord r;
        r.n = history.size();
        r.initial = initial;
        r.x = x;
        r.f = e.f;
        r.c = e.c;
        r.valid = check_validity(e.c, kinds, config.epsilon);
        if (r.all_valid()) best_valid_f = std::min(best_valid_f, e.f);
        r.best_valid_f = best_valid_f;
        trace.records.push_back(std::move(r));
    };

    const Matrix X0 = latin_hypercube(config.n0, problem.bounds, mix_seed(config.seed, 1));
    for (Eigen::Index i = 0; i < X0.rows(); ++i) {
        const Vector x = X0.row(i).transpose();
        append(x, evaluate(problem, x), true);
    }

    ALState state;
    state.lambda = Vector::Zero(kinds.size());
    state.epsilon = config.epsilon;
    if (uses_al) state = initialize(history, kinds, config.epsilon);
    for (TraceRecord& r : trace.records) {
        r.lambda = state.lambda;
        r.rho = uses_al ? state.rho : std::numeric_limits<double>::quiet_NaN();
        r.al_iteration = state.iteration;
        r.wall_time = elapsed();
    }

    std::vector<std::shared_ptr<const GPSurrogate>> constraint_models(static_cast<std::size_t>(kinds.size()));
    std::shared_ptr<const GPSurrogate> objective_model;

    const AcquisitionKind kind = slack ? AcquisitionKind::SlackAlEi
                               : config.method == Method::OrigAlEiMc ? AcquisitionKind::OriginalAlEiMc
                                                                      : AcquisitionKind::Efi;
    ProposalConfig proposal = config.proposal;
    proposal.polish = config.method == Method::SlackAlEiOptim;

    for (int iter = 0; history.size() < config.budget; ++iter) {
        const std::uint64_t iter_seed = mix_seed(config.seed, 1000 + static_cast<std::uint64_t>(iter));
        try {
            for (int j = 0; j < kinds.size(); ++j) {
                GPFitOptions opts = config.gp;
                opts.seed = mix_seed(iter_seed, 10 + static_cast<std::uint64_t>(j));
                if (constraint_models[j]) opts.warm_start = constraint_models[j]->config().lengthscales;
                constraint_models[j] = fit_model(history.X, history.C.col(j), problem.bounds, opts);
            }
            if (!problem.objective_known) {
                GPFitOptions opts = config.gp;
                opts.seed = mix_seed(iter_seed, 9);
                if (objective_model) opts.warm_start = objective_model->config().lengthscales;
                objective_model = fit_model(history.X, history.f, problem.bounds, opts);
            }
        } catch (const FitError& e) {
            trace.aborted = true;
            trace.abort_reason = std::string("surrogate fit failed: ") + e.what();
            break;
        }

        AcquisitionContext ctx;
        ctx.constraint_models = constraint_models;
        if (problem.objective_known) ctx.known_objective = problem.objective;
        else ctx.objective_model = objective_model;
        ctx.al_state = state;
        ctx.kinds = kinds;
        ctx.quad = config.quad;
        ctx.mc_samples = config.mc_samples;
        ctx.mc_seed = mix_seed(iter_seed, 2);
        ctx.fallback = config.fallback;
        if (slack) ctx.incumbent = composite_incumbent(history, state, kinds).value;
        else if (uses_al) ctx.incumbent = original_incumbent(history, state, kinds).value;
        else ctx.incumbent = best_valid_f;

        proposal.seed = mix_seed(iter_seed, 3);
        const Proposal next = propose_next(ctx, problem.bounds, proposal, kind, history.X);
        append(next.x, evaluate(problem, next.x), false);

        if (slack) {
            const int k = composite_incumbent(history, state, kinds).index;
            const Vector c = history.c(k);
            state = update_multipliers(state, c, optimal_slack(c, state, kinds));
            state = update_penalty(state, c, kinds);
        } else if (uses_al) {
            const int k = original_incumbent(history, state, kinds).index;
            const Vector c = history.c(k);
            state = update_multipliers_original(state, c, kinds);
            state = update_penalty(state, c, kinds);
        }

        TraceRecord& r = trace.records.back();
        r.lambda = state.lambda;
        r.rho = uses_al ? state.rho : std::numeric_limits<double>::quiet_NaN();
        r.al_iteration = state.iteration;
        r.incumbent = ctx.incumbent;
        r.acquisition = next.score.value;
        r.wall_time = elapsed();
    }
    return trace;
}

ProgressSeries progress(const Trace& trace, double reference, double ceiling) {
    ProgressSeries s;
    for (const TraceRecord& r : trace.records) {
        const double best = std::isfinite(r.best_valid_f) ? r.best_valid_f : ceiling;
        s.n.push_back(r.n);
        s.best_valid.push_back(best);
        s.log10_gap.push_back(std::log10(std::max(best - reference, 1e-12)));
    }
    return s;
}

int first_valid_n(const Trace& trace) {
    for (const TraceRecord& r : trace.records)
        if (r.all_valid()) return r.n;
    return -1;
}

} // namespace slackal
