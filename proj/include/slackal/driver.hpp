#pragma once

#include "slackal/acquisition.hpp"
#include "slackal/augmented_lagrangian.hpp"
#include "slackal/gp_surrogate.hpp"
#include "slackal/problems.hpp"
#include "slackal/wncs.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace slackal {

enum class Method { SlackAlEi, SlackAlEiOptim, OrigAlEiMc, Efi };

// CLI names: slack-al-ei, slack-al-ei-optim, orig-al-ei-mc, efi.
[[nodiscard]] std::string to_string(Method method);
[[nodiscard]] Method parse_method(const std::string& name);
[[nodiscard]] std::vector<Method> all_methods();

struct RunConfig {
    std::string problem = "lsq";
    ProblemOptions problem_options;
    Method method = Method::SlackAlEiOptim;
    int budget = 40;
    int n0 = 10;
    double epsilon = 1e-2;
    std::uint64_t seed = 0;
    ProposalConfig proposal;
    QuadratureConfig quad;
    GPFitOptions gp;
    int mc_samples = 1000;
    FallbackRule fallback = FallbackRule::CompositeMean;

    void validate(const ProblemSpec& problem_spec) const;
};

struct TraceRecord {
    int n = 0;
    bool initial = false;
    Vector x;
    double f = 0.0;
    Vector c;
    std::vector<bool> valid;  // per constraint
    Vector lambda;            // after this iteration's update
    double rho = std::numeric_limits<double>::quiet_NaN();
    int al_iteration = 0;     // AL iteration counter k after the update
    double incumbent = std::numeric_limits<double>::quiet_NaN();  // used to score this proposal
    double best_valid_f = std::numeric_limits<double>::infinity();
    double acquisition = std::numeric_limits<double>::quiet_NaN();
    double wall_time = 0.0;  // seconds since the run started

    [[nodiscard]] bool all_valid() const;
};

struct Trace {
    std::string problem;
    std::string method;
    std::uint64_t seed = 0;
    int n0 = 0;
    int budget = 0;
    double epsilon = 0.0;
    int dim = 0;
    ConstraintKinds kinds;
    std::vector<std::string> constraint_labels;
    std::vector<TraceRecord> records;
    bool aborted = false;
    std::string abort_reason;
};

// Runs one sequential design: LHS initial design, then one surrogate fit,
// proposal, evaluation and AL update per iteration until the budget is used.
[[nodiscard]] Trace run(const RunConfig& config);

struct ProgressSeries {
    std::vector<int> n;
    std::vector<double> best_valid;  // ceiling until a valid point is found
    std::vector<double> log10_gap;   // log10(max(best_valid - reference, 1e-12))
};

[[nodiscard]] ProgressSeries progress(const Trace& trace, double reference, double ceiling);

// n of the first valid evaluation, or -1.
[[nodiscard]] int first_valid_n(const Trace& trace);

} // namespace slackal
