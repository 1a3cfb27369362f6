#include "slackal/bench.hpp"

#include "slackal/errors.hpp"
#include "slackal/svg_plot.hpp"
#include "slackal/trace_io.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace slackal {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr int report_schema_version = 1;

template<class Int>
Int parse_integer(const std::string& s) {
    Int v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) throw IOError("malformed integer '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return nan;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
    if (v.size() < 2) return v.empty() ? nan : 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return nan;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    if (v.size() % 2) return v[h];
    if (std::isinf(v[h])) return v[h];
    return 0.5 * (v[h - 1] + v[h]);
}

bool completed(const Trace& t, int budget) {
    return !t.aborted && static_cast<int>(t.records.size()) == budget;
}

bool is_optimal(double best, double f_star, double threshold) {
    if (!std::isfinite(best)) return false;
    const double scale = f_star != 0.0 ? std::abs(f_star) : 1.0;
    return (best - f_star) <= threshold * scale;
}

// Best-valid values at n over the completed runs of one series.
std::vector<double> values_at(const std::vector<Trace>& traces, int n, const AggregateSettings& s) {
    std::vector<double> out;
    for (const Trace& t : traces) {
        if (!completed(t, s.budget)) continue;
        const double b = t.records[static_cast<std::size_t>(n - 1)].best_valid_f;
        out.push_back(std::isfinite(b) ? b : s.ceiling);
    }
    return out;
}

std::ofstream open_file(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open " + path.string() + " for writing");
    return out;
}

void close_file(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw IOError("write failed: " + path.string());
}

std::string fmt_cell(double v, int digits = 4) {
    if (std::isnan(v)) return "n/a";
    if (std::isinf(v)) return v > 0 ? "never" : "-inf";
    std::ostringstream ss;
    ss.precision(digits);
    ss << v;
    return ss.str();
}

} // namespace

void BenchConfig::validate() const {
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (methods.empty()) throw ConfigError("at least one method is required");
    if (!(optimality_threshold >= 0.0)) throw ConfigError("optimality_threshold must be nonnegative");
    if (threads < 0) throw ConfigError("threads must be nonnegative");
    for (int n : test_points)
        if (n < 1 || n > base.budget) throw ConfigError("test points must lie in [1, budget]");
    base.validate(make_problem(base.problem, base.problem_options));
}

PairTest welch_one_sided(const std::vector<double>& a, const std::vector<double>& b) {
    PairTest t;
    t.mean_a = mean_of(a);
    t.mean_b = mean_of(b);
    if (a.size() < 2 || b.size() < 2) {
        t.t_statistic = t.df = t.p_value = nan;
        return t;
    }
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double qa = variance_of(a) / na, qb = variance_of(b) / nb;
    const double diff = t.mean_a - t.mean_b;
    if (qa + qb == 0.0) {
        t.t_statistic = diff < 0 ? -inf : diff > 0 ? inf : 0.0;
        t.df = na + nb - 2.0;
        t.p_value = diff < 0 ? 0.0 : diff > 0 ? 1.0 : 0.5;
        return t;
    }
    t.t_statistic = diff / std::sqrt(qa + qb);
    t.df = (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    const boost::math::students_t dist(t.df);
    t.p_value = boost::math::cdf(dist, t.t_statistic);
    return t;
}

AggregateReport aggregate(const std::vector<std::string>& method_labels,
                          const std::vector<std::vector<Trace>>& traces, const AggregateSettings& settings) {
    if (method_labels.size() != traces.size()) throw ShapeError("one trace list per method is required");
    if (settings.budget < 1) throw ConfigError("budget must be positive");
    AggregateReport report;
    report.settings = settings;
    if (report.settings.test_points.empty()) report.settings.test_points = {settings.budget};
    const int budget = settings.budget;

    for (std::size_t mi = 0; mi < traces.size(); ++mi) {
        MethodSummary ms;
        ms.method = method_labels[mi];
        std::vector<double> first_valid;
        for (std::size_t r = 0; r < traces[mi].size(); ++r) {
            const Trace& t = traces[mi][r];
            RunSummary rs;
            rs.series = static_cast<int>(mi);
            rs.method = ms.method;
            rs.rep = static_cast<int>(r);
            rs.seed = t.seed;
            rs.ok = completed(t, budget);
            if (!rs.ok) {
                rs.message = t.aborted ? t.abort_reason
                                       : "trace has " + std::to_string(t.records.size()) + " of " +
                                             std::to_string(budget) + " evaluations";
                if (rs.message.empty()) rs.message = "aborted";
            }
            rs.first_valid_n = first_valid_n(t);
            rs.final_best_valid = t.records.empty() ? inf : t.records.back().best_valid_f;
            if (rs.ok) {
                ++ms.runs;
                first_valid.push_back(rs.first_valid_n < 0 ? inf : static_cast<double>(rs.first_valid_n));
            } else {
                ++ms.failed;
            }
            report.runs.push_back(std::move(rs));
        }
        ms.median_first_valid = median_of(first_valid);

        for (int n = 1; n <= budget; ++n) {
            const std::vector<double> v = values_at(traces[mi], n, settings);
            double valid = 0.0, optimal = 0.0, gap = 0.0;
            for (const Trace& t : traces[mi]) {
                if (!completed(t, budget)) continue;
                const double b = t.records[static_cast<std::size_t>(n - 1)].best_valid_f;
                valid += std::isfinite(b) ? 1.0 : 0.0;
                optimal += is_optimal(b, settings.f_star, settings.optimality_threshold) ? 1.0 : 0.0;
                const double shown = std::isfinite(b) ? b : settings.ceiling;
                gap += std::log10(std::max(shown - settings.f_star, 1e-12));
            }
            const double runs = static_cast<double>(ms.runs);
            ms.mean_best_valid.push_back(mean_of(v));
            ms.sd_best_valid.push_back(std::sqrt(variance_of(v)));
            ms.prop_valid.push_back(ms.runs ? valid / runs : nan);
            ms.prop_optimal.push_back(ms.runs ? optimal / runs : nan);
            ms.mean_log10_gap.push_back(ms.runs ? gap / runs : nan);
        }
        report.methods.push_back(std::move(ms));
    }

    for (int n : report.settings.test_points) {
        if (n < 1 || n > budget) throw ConfigError("test point outside [1, budget]");
        for (std::size_t a = 0; a < traces.size(); ++a) {
            for (std::size_t b = 0; b < traces.size(); ++b) {
                if (a == b) continue;
                PairTest t = welch_one_sided(values_at(traces[a], n, settings), values_at(traces[b], n, settings));
                t.n = n;
                t.series_a = static_cast<int>(a);
                t.series_b = static_cast<int>(b);
                t.method_a = method_labels[a];
                t.method_b = method_labels[b];
                report.tests.push_back(std::move(t));
            }
        }
    }
    return report;
}

BenchResult bench(const BenchConfig& config, const BenchLog& log) {
    config.validate();
    const ProblemSpec problem = make_problem(config.base.problem, config.base.problem_options);
    const ReferenceOptimum ref = reference_optimum(problem, config.reference_grid, config.base.epsilon);

    const std::size_t n_methods = config.methods.size();
    const std::size_t n_reps = static_cast<std::size_t>(config.reps);
    const std::size_t jobs = n_methods * n_reps;
    BenchResult result;
    result.traces.assign(n_methods, std::vector<Trace>(n_reps));

    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const std::size_t mi = job % n_methods, r = job / n_methods;
            RunConfig rc = config.base;
            rc.method = config.methods[mi];
            rc.seed = config.seed_base + r;
            Trace& out = result.traces[mi][r];
            try {
                out = run(rc);
            } catch (const std::exception& e) {
                out = Trace{};
                out.problem = problem.name;
                out.method = to_string(rc.method);
                out.seed = rc.seed;
                out.n0 = rc.n0;
                out.budget = rc.budget;
                out.epsilon = rc.epsilon;
                out.dim = problem.dim;
                out.kinds = problem.kinds;
                out.constraint_labels = problem.constraint_labels;
                out.aborted = true;
                out.abort_reason = e.what();
            }
            if (log) {
                std::lock_guard<std::mutex> lock(log_mutex);
                std::ostringstream ss;
                ss << to_string(rc.method) << " rep " << r << " seed " << rc.seed;
                if (out.aborted) ss << " FAILED: " << out.abort_reason;
                else ss << " best_valid " << format_double(out.records.back().best_valid_f);
                log(ss.str());
            }
        }
    };

    std::size_t threads = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                             : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    AggregateSettings s;
    s.problem = problem.name;
    s.budget = config.base.budget;
    s.epsilon = config.base.epsilon;
    s.f_star = ref.f;
    s.reference_tag = ref.tag;
    s.ceiling = problem.no_valid_ceiling;
    s.optimality_threshold = config.optimality_threshold;
    s.test_points = config.test_points;
    std::vector<std::string> labels;
    for (Method m : config.methods) labels.push_back(to_string(m));
    result.report = aggregate(labels, result.traces, s);
    return result;
}

std::string render_report_svg(const AggregateReport& report) {
    PlotPanel progress{"Mean best valid objective", "n", "best valid f", {}};
    PlotPanel gap{"Mean log10 utility gap", "n", "log10(best - f*)", {}};
    PlotPanel valid{"Proportion of runs with a valid point", "n", "proportion valid", {}};
    PlotPanel optimal{"Proportion of runs within the optimality threshold", "n", "proportion optimal", {}};
    for (const MethodSummary& m : report.methods) {
        std::vector<double> n(m.mean_best_valid.size());
        std::iota(n.begin(), n.end(), 1.0);
        progress.series.push_back({m.method, n, m.mean_best_valid});
        gap.series.push_back({m.method, n, m.mean_log10_gap});
        valid.series.push_back({m.method, n, m.prop_valid});
        optimal.series.push_back({m.method, n, m.prop_optimal});
    }
    return render_svg({progress, gap, valid, optimal}, 2);
}

std::string render_report_markdown(const AggregateReport& report) {
    const AggregateSettings& s = report.settings;
    std::ostringstream md;
    md << "# Benchmark report: " << s.problem << "\n\n";
    md << "- budget: " << s.budget << "\n";
    md << "- epsilon: " << format_double(s.epsilon) << "\n";
    md << "- reference f*: " << format_double(s.f_star) << " (" << s.reference_tag << ")\n";
    md << "- optimality threshold: " << format_double(s.optimality_threshold) << " relative gap\n";
    md << "- no-valid ceiling: " << format_double(s.ceiling) << "\n\n";

    for (int n : s.test_points) {
        md << "## Summary at n = " << n << "\n\n";
        md << "| method | runs | failed | mean best valid | sd | prop valid | prop optimal | median first valid |\n";
        md << "|---|---|---|---|---|---|---|---|\n";
        for (const MethodSummary& m : report.methods) {
            const std::size_t i = static_cast<std::size_t>(n - 1);
            md << "| " << m.method << " | " << m.runs << " | " << m.failed << " | "
               << fmt_cell(m.mean_best_valid[i], 6) << " | " << fmt_cell(m.sd_best_valid[i]) << " | "
               << fmt_cell(m.prop_valid[i], 3) << " | " << fmt_cell(m.prop_optimal[i], 3) << " | "
               << fmt_cell(m.median_first_valid) << " |\n";
        }
        md << "\n";
    }
    if (!report.tests.empty()) {
        md << "## One-sided Welch tests (H1: mean of A < mean of B)\n\n";
        md << "| n | A | B | mean A | mean B | t | df | p |\n|---|---|---|---|---|---|---|---|\n";
        for (const PairTest& t : report.tests) {
            md << "| " << t.n << " | " << t.method_a << " | " << t.method_b << " | " << fmt_cell(t.mean_a, 6)
               << " | " << fmt_cell(t.mean_b, 6) << " | " << fmt_cell(t.t_statistic) << " | " << fmt_cell(t.df)
               << " | " << fmt_cell(t.p_value) << " |\n";
        }
        md << "\n";
    }
    std::vector<const RunSummary*> failures;
    for (const RunSummary& r : report.runs)
        if (!r.ok) failures.push_back(&r);
    md << "## Failed runs\n\n";
    if (failures.empty()) md << "None.\n";
    for (const RunSummary* r : failures)
        md << "- " << r->method << " rep " << r->rep << " (seed " << r->seed << "): " << r->message << "\n";
    md << "\nPlots: report.svg\n";
    return md.str();
}

void emit(const AggregateReport& report, const std::string& format, const std::filesystem::path& out_dir) {
    if (report.methods.empty()) throw StateError("report has no methods; nothing to emit");
    const bool all = format == "all";
    const bool csv = all || format == "csv", svg = all || format == "svg", md = all || format == "md";
    if (!csv && !svg && !md) throw ConfigError("unknown report format '" + format + "' (csv, svg, md or all)");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IOError("cannot create " + out_dir.string() + ": " + ec.message());
    const AggregateSettings& s = report.settings;

    if (csv) {
        const auto path = out_dir / "progress.csv";
        std::ofstream out = open_file(path);
        out << "# slackal-progress v" << report_schema_version << '\n';
        out << "# problem=" << s.problem << '\n';
        out << "# budget=" << s.budget << '\n';
        out << "# epsilon=" << format_double(s.epsilon) << '\n';
        out << "# f_star=" << format_double(s.f_star) << '\n';
        out << "# reference_tag=" << s.reference_tag << '\n';
        out << "# ceiling=" << format_double(s.ceiling) << '\n';
        out << "# optimality_threshold=" << format_double(s.optimality_threshold) << '\n';
        out << "# test_points=";
        for (std::size_t i = 0; i < s.test_points.size(); ++i) out << (i ? ";" : "") << s.test_points[i];
        out << '\n';
        out << "series,method,n,runs,failed,mean_best_valid,sd_best_valid,prop_valid,prop_optimal,mean_log10_gap\n";
        for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
            const MethodSummary& m = report.methods[mi];
            for (std::size_t i = 0; i < m.mean_best_valid.size(); ++i) {
                out << mi << ',' << m.method << ',' << i + 1 << ',' << m.runs << ',' << m.failed << ','
                    << format_double(m.mean_best_valid[i]) << ',' << format_double(m.sd_best_valid[i]) << ','
                    << format_double(m.prop_valid[i]) << ',' << format_double(m.prop_optimal[i]) << ','
                    << format_double(m.mean_log10_gap[i]) << '\n';
            }
        }
        close_file(out, path);

        const auto runs_path = out_dir / "runs.csv";
        std::ofstream runs = open_file(runs_path);
        runs << "# slackal-runs v" << report_schema_version << '\n';
        runs << "series,method,rep,seed,status,first_valid_n,final_best_valid,message\n";
        for (const RunSummary& r : report.runs) {
            std::string msg = r.message;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            runs << r.series << ',' << r.method << ',' << r.rep << ',' << r.seed << ',' << (r.ok ? "ok" : "failed")
                 << ',' << r.first_valid_n << ',' << format_double(r.final_best_valid) << ',' << msg << '\n';
        }
        close_file(runs, runs_path);

        const auto tests_path = out_dir / "tests.csv";
        std::ofstream tests = open_file(tests_path);
        tests << "# slackal-tests v" << report_schema_version << '\n';
        tests << "n,series_a,series_b,method_a,method_b,mean_a,mean_b,t_statistic,df,p_value\n";
        for (const PairTest& t : report.tests) {
            tests << t.n << ',' << t.series_a << ',' << t.series_b << ',' << t.method_a << ',' << t.method_b << ','
                  << format_double(t.mean_a) << ',' << format_double(t.mean_b) << ','
                  << format_double(t.t_statistic) << ',' << format_double(t.df) << ','
                  << format_double(t.p_value) << '\n';
        }
        close_file(tests, tests_path);
    }
    if (svg) {
        const auto path = out_dir / "report.svg";
        std::ofstream out = open_file(path);
        out << render_report_svg(report);
        close_file(out, path);
    }
    if (md) {
        const auto path = out_dir / "report.md";
        std::ofstream out = open_file(path);
        out << render_report_markdown(report);
        close_file(out, path);
    }
}

namespace {

// Data rows of one of our CSV files plus its '#' metadata.
struct CsvTable {
    std::map<std::string, std::string> meta;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_table(const std::filesystem::path& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                key.erase(0, key.find_first_not_of(' '));
                t.meta[key] = line.substr(eq + 1);
            }
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != columns) throw IOError(path.string() + ": expected " + std::to_string(columns) + " columns");
        if (!header) {
            header = true;
            continue;
        }
        t.rows.push_back(std::move(f));
    }
    if (!header) throw IOError(path.string() + ": missing header");
    return t;
}

} // namespace

AggregateReport read_report_csv(const std::filesystem::path& dir) {
    AggregateReport report;
    try {
        const CsvTable progress = read_table(dir / "progress.csv", 10);
        AggregateSettings& s = report.settings;
        s.problem = progress.meta.at("problem");
        s.budget = parse_integer<int>(progress.meta.at("budget"));
        s.epsilon = parse_double(progress.meta.at("epsilon"));
        s.f_star = parse_double(progress.meta.at("f_star"));
        s.reference_tag = progress.meta.at("reference_tag");
        s.ceiling = parse_double(progress.meta.at("ceiling"));
        s.optimality_threshold = parse_double(progress.meta.at("optimality_threshold"));
        for (const std::string& n : split(progress.meta.at("test_points"), ';'))
            if (!n.empty()) s.test_points.push_back(parse_integer<int>(n));
        for (const auto& r : progress.rows) {
            const std::size_t series = parse_integer<std::size_t>(r[0]);
            if (series == report.methods.size()) {
                report.methods.emplace_back();
                report.methods.back().method = r[1];
                report.methods.back().runs = parse_integer<int>(r[3]);
                report.methods.back().failed = parse_integer<int>(r[4]);
            } else if (series + 1 != report.methods.size()) {
                throw IOError("progress.csv: series out of order");
            }
            MethodSummary& m = report.methods.back();
            m.mean_best_valid.push_back(parse_double(r[5]));
            m.sd_best_valid.push_back(parse_double(r[6]));
            m.prop_valid.push_back(parse_double(r[7]));
            m.prop_optimal.push_back(parse_double(r[8]));
            m.mean_log10_gap.push_back(parse_double(r[9]));
        }

        const CsvTable runs = read_table(dir / "runs.csv", 8);
        std::vector<std::vector<double>> first_valid(report.methods.size());
        for (const auto& r : runs.rows) {
            RunSummary rs;
            rs.series = parse_integer<int>(r[0]);
            rs.method = r[1];
            rs.rep = parse_integer<int>(r[2]);
            rs.seed = parse_integer<std::uint64_t>(r[3]);
            rs.ok = r[4] == "ok";
            rs.first_valid_n = parse_integer<int>(r[5]);
            rs.final_best_valid = parse_double(r[6]);
            rs.message = r[7];
            if (rs.series < 0 || static_cast<std::size_t>(rs.series) >= report.methods.size())
                throw IOError("runs.csv: unknown series");
            if (rs.ok)
                first_valid[static_cast<std::size_t>(rs.series)].push_back(
                    rs.first_valid_n < 0 ? inf : static_cast<double>(rs.first_valid_n));
            report.runs.push_back(std::move(rs));
        }
        for (std::size_t i = 0; i < report.methods.size(); ++i)
            report.methods[i].median_first_valid = median_of(first_valid[i]);

        const CsvTable tests = read_table(dir / "tests.csv", 10);
        for (const auto& r : tests.rows) {
            PairTest t;
            t.n = parse_integer<int>(r[0]);
            t.series_a = parse_integer<int>(r[1]);
            t.series_b = parse_integer<int>(r[2]);
            t.method_a = r[3];
            t.method_b = r[4];
            t.mean_a = parse_double(r[5]);
            t.mean_b = parse_double(r[6]);
            t.t_statistic = parse_double(r[7]);
            t.df = parse_double(r[8]);
            t.p_value = parse_double(r[9]);
            report.tests.push_back(std::move(t));
        }
    } catch (const std::out_of_range&) {
        throw IOError(dir.string() + ": missing report field");
    } catch (const IOError& e) {
        throw IOError(dir.string() + ": " + e.what());
    }
    return report;
}

} // namespace slackal
