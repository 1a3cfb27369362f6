#pragma once

#include "slackal/driver.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace slackal {

struct BenchConfig {
    RunConfig base;  // problem, budget, n0, epsilon and tuning shared by every run
    std::vector<Method> methods{Method::SlackAlEiOptim};
    int reps = 30;
    std::uint64_t seed_base = 0;  // repetition r uses seed_base + r for every method
    double optimality_threshold = 0.01;  // relative gap to f* counted as optimal
    int threads = 0;                     // 0: hardware concurrency
    std::vector<int> test_points;        // n values for the pairwise tests; empty: {budget}
    int reference_grid = 0;              // grid resolution for the reference optimum (0: default)

    void validate() const;
};

// Everything aggregation needs besides the traces themselves.
struct AggregateSettings {
    std::string problem;
    int budget = 0;
    double epsilon = 0.0;
    double f_star = 0.0;
    std::string reference_tag;
    double ceiling = 0.0;  // best-valid value charged while nothing valid has been seen
    double optimality_threshold = 0.01;
    std::vector<int> test_points;
};

struct MethodSummary {
    std::string method;
    int runs = 0;    // completed runs that enter the aggregates
    int failed = 0;  // aborted or errored runs, excluded
    // Indexed by n - 1.
    std::vector<double> mean_best_valid;
    std::vector<double> sd_best_valid;
    std::vector<double> prop_valid;
    std::vector<double> prop_optimal;
    std::vector<double> mean_log10_gap;
    double median_first_valid = 0.0;  // over completed runs; +inf when most never find one
};

struct RunSummary {
    int series = 0;  // index into AggregateReport::methods
    std::string method;
    int rep = 0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string message;
    int first_valid_n = -1;
    double final_best_valid = 0.0;
};

// One-sided Welch test of H1: mean(a) < mean(b) on best-valid values at n.
struct PairTest {
    int n = 0;
    int series_a = 0;
    int series_b = 0;
    std::string method_a;
    std::string method_b;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double t_statistic = 0.0;
    double df = 0.0;
    double p_value = 0.0;
};

struct AggregateReport {
    AggregateSettings settings;
    std::vector<MethodSummary> methods;
    std::vector<RunSummary> runs;
    std::vector<PairTest> tests;
};

struct BenchResult {
    AggregateReport report;
    std::vector<std::vector<Trace>> traces;  // [method][rep]; failed runs carry aborted = true
};

[[nodiscard]] PairTest welch_one_sided(const std::vector<double>& a, const std::vector<double>& b);

// Pure function of the traces. Traces that are aborted or shorter than the
// budget count as failures. Seeds and repetition numbers are read from the
// traces, repetition r being the r-th trace of a method.
[[nodiscard]] AggregateReport aggregate(const std::vector<std::string>& method_labels,
                                        const std::vector<std::vector<Trace>>& traces,
                                        const AggregateSettings& settings);

using BenchLog = std::function<void(const std::string&)>;

// Runs reps x methods sequential designs over a worker pool, then aggregates.
[[nodiscard]] BenchResult bench(const BenchConfig& config, const BenchLog& log = {});

// format: csv, svg, md or all. Writes progress.csv, runs.csv and tests.csv,
// report.svg, report.md into out_dir.
void emit(const AggregateReport& report, const std::string& format, const std::filesystem::path& out_dir);

// Reads progress.csv, runs.csv and tests.csv back from a directory written by emit.
[[nodiscard]] AggregateReport read_report_csv(const std::filesystem::path& dir);

[[nodiscard]] std::string render_report_svg(const AggregateReport& report);
[[nodiscard]] std::string render_report_markdown(const AggregateReport& report);

} // namespace slackal
