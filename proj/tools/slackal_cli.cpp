#include "slackal/bench.hpp"
#include "slackal/config_file.hpp"
#include "slackal/errors.hpp"
#include "slackal/problems.hpp"
#include "slackal/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>

using namespace slackal;
using nlohmann::json;

namespace {

// Flags the user actually passed, as config key/value pairs; applied after the
// config file so they take precedence.
struct Overrides {
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> options;

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        auto* opt = app->add_option(flag, values[key], help);
        options.emplace_back(key, opt);
    }
    KeyValues given() const {
        KeyValues kv;
        for (const auto& [key, opt] : options)
            if (opt->count() > 0) kv[key] = values.at(key);
        return kv;
    }
};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Settings load_settings(const std::string& config_path, const Overrides& o) {
    Settings s;
    if (!config_path.empty()) apply_config(read_config_file(config_path), s);
    apply_config(o.given(), s);
    return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IOError("write failed: " + path.string());
}

void make_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IOError("cannot create " + dir.string() + ": " + ec.message());
}

std::string trace_stem(const Trace& t, int rep) {
    return t.method + "_rep" + std::to_string(rep) + "_seed" + std::to_string(t.seed);
}

int cmd_run(const Settings& s) {
    if (s.format != "csv" && s.format != "json" && s.format != "all")
        throw ConfigError("run: format must be csv, json or all");
    RunConfig rc = s.bench.base;
    rc.method = s.bench.methods.front();
    const Trace t = run(rc);
    const std::filesystem::path dir = s.out_dir;
    make_dir(dir);
    const std::string stem = t.problem + "_" + trace_stem(t, 0);
    json out{{"problem", t.problem}, {"method", t.method}, {"seed", t.seed}, {"evaluations", t.records.size()},
             {"aborted", t.aborted}, {"first_valid_n", first_valid_n(t)},
             {"best_valid_f", number(t.records.empty() ? INFINITY : t.records.back().best_valid_f)}};
    json files = json::array();
    if (s.format == "csv" || s.format == "all") {
        write_trace_csv(t, dir / (stem + ".csv"));
        files.push_back((dir / (stem + ".csv")).string());
    }
    if (s.format == "json" || s.format == "all") {
        write_trace_json(t, dir / (stem + ".json"));
        files.push_back((dir / (stem + ".json")).string());
    }
    out["files"] = files;
    std::cout << out.dump(1) << '\n';
    return 0;
}

json report_summary(const AggregateReport& r) {
    json methods = json::array();
    const std::size_t last = static_cast<std::size_t>(r.settings.budget - 1);
    for (const MethodSummary& m : r.methods) {
        methods.push_back({{"method", m.method},
                           {"runs", m.runs},
                           {"failed", m.failed},
                           {"mean_best_valid", number(m.mean_best_valid[last])},
                           {"prop_valid", number(m.prop_valid[last])},
                           {"prop_optimal", number(m.prop_optimal[last])},
                           {"median_first_valid", number(m.median_first_valid)}});
    }
    return {{"problem", r.settings.problem}, {"budget", r.settings.budget}, {"f_star", r.settings.f_star},
            {"methods", methods}};
}

int cmd_bench(const Settings& s) {
    const std::filesystem::path dir = s.out_dir;
    const BenchResult result = bench(s.bench, [](const std::string& line) { std::cerr << line << '\n'; });
    make_dir(dir / "traces");
    for (std::size_t mi = 0; mi < result.traces.size(); ++mi) {
        for (std::size_t r = 0; r < result.traces[mi].size(); ++r) {
            const Trace& t = result.traces[mi][r];
            const std::string name = "s" + std::to_string(mi) + "_" + trace_stem(t, static_cast<int>(r)) + ".json";
            write_trace_json(t, dir / "traces" / name);
        }
    }
    emit(result.report, s.format, dir);
    json out = report_summary(result.report);
    out["out_dir"] = dir.string();
    std::cout << out.dump(1) << '\n';
    return 0;
}

int cmd_oracle(const Settings& s, int grid) {
    std::vector<std::string> names;
    if (s.bench.base.problem == "all") names = problem_names();
    else names.push_back(s.bench.base.problem);
    json all = json::array();
    for (const std::string& name : names) {
        const ProblemSpec p = make_problem(name, s.bench.base.problem_options);
        const ReferenceOptimum ref = reference_optimum(p, grid, s.bench.base.epsilon);
        all.push_back({{"problem", p.name},
                       {"epsilon", ref.epsilon},
                       {"f_star", ref.f},
                       {"x_star", std::vector<double>(ref.x.data(), ref.x.data() + ref.x.size())},
                       {"tag", ref.tag}});
    }
    make_dir(s.out_dir);
    write_text(std::filesystem::path(s.out_dir) / "oracle.json", all.dump(1) + "\n");
    std::cout << all.dump(1) << '\n';
    return 0;
}

int cmd_report(const Settings& s, const std::string& traces_dir, const std::string& reference) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(traces_dir, ec))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    if (ec) throw IOError("cannot read " + traces_dir + ": " + ec.message());
    if (files.empty()) throw IOError("no trace JSON files in " + traces_dir);
    std::sort(files.begin(), files.end());

    // Files written by bench start with "s<series>_", which keeps the method
    // order and separates a method listed twice; other files group by method.
    auto series_of = [](const std::filesystem::path& f, const Trace& t) {
        const std::string name = f.filename().string();
        const auto us = name.find('_');
        if (name.size() > 1 && name[0] == 's' && us != std::string::npos && us > 1 &&
            std::all_of(name.begin() + 1, name.begin() + static_cast<long>(us), ::isdigit))
            return std::make_pair(std::stoi(name.substr(1, us - 1)), t.method);
        return std::make_pair(-1, t.method);
    };
    std::vector<std::pair<int, std::string>> keys;
    std::vector<std::vector<Trace>> traces;
    for (const auto& f : files) {
        Trace t = read_trace_json(f);
        const auto key = series_of(f, t);
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
            keys.push_back(key);
            traces.emplace_back();
            it = keys.end() - 1;
        }
        traces[static_cast<std::size_t>(it - keys.begin())].push_back(std::move(t));
    }
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a].first < keys[b].first; });
    std::vector<std::string> labels;
    std::vector<std::vector<Trace>> sorted;
    for (std::size_t i : order) {
        labels.push_back(keys[i].second);
        sorted.push_back(std::move(traces[i]));
    }
    traces = std::move(sorted);
    for (auto& per : traces)
        std::stable_sort(per.begin(), per.end(), [](const Trace& a, const Trace& b) { return a.seed < b.seed; });

    const Trace& first = traces.front().front();
    for (const auto& per : traces)
        for (const Trace& t : per)
            if (t.problem != first.problem || t.budget != first.budget || t.epsilon != first.epsilon)
                throw ConfigError("traces mix problems, budgets or epsilons");

    ProblemOptions opts = s.bench.base.problem_options;
    const ProblemSpec p = make_problem(first.problem, opts);
    AggregateSettings as;
    as.problem = p.name;
    as.budget = first.budget;
    as.epsilon = first.epsilon;
    as.ceiling = p.no_valid_ceiling;
    as.optimality_threshold = s.bench.optimality_threshold;
    as.test_points = s.bench.test_points;
    if (!reference.empty()) {
        try {
            as.f_star = parse_double(reference);
        } catch (const IOError&) {
            throw ConfigError("--reference: expected a number, got '" + reference + "'");
        }
        as.reference_tag = "user";
    } else {
        const ReferenceOptimum ref = reference_optimum(p, s.bench.reference_grid, first.epsilon);
        as.f_star = ref.f;
        as.reference_tag = ref.tag;
    }
    const AggregateReport report = aggregate(labels, traces, as);
    emit(report, s.format, s.out_dir);
    json out = report_summary(report);
    out["out_dir"] = s.out_dir;
    std::cout << out.dump(1) << '\n';
    return 0;
}

int fail(const std::string& kind, const std::string& message, int code) {
    std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slack-variable augmented Lagrangian Bayesian optimization harness"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides run_o, bench_o, oracle_o, report_o;

    auto common = [&](CLI::App* sub, Overrides& o) {
        sub->add_option("--config", config_path, "key = value config file; flags override it")
            ->check(CLI::ExistingFile);
        o.add(sub, "--problem", "problem", "lsq, gsbp or lah (oracle: also all)");
        o.add(sub, "--epsilon", "epsilon", "equality tolerance");
        o.add(sub, "--out-dir", "out_dir", "output directory");
        o.add(sub, "--format", "format", "output format");
    };
    auto design = [&](CLI::App* sub, Overrides& o) {
        o.add(sub, "--method", "method", "slack-al-ei, slack-al-ei-optim, orig-al-ei-mc, efi (bench: comma list or all)");
        o.add(sub, "--budget", "budget", "total evaluations");
        o.add(sub, "--n0", "n0", "initial design size");
        o.add(sub, "--seed", "seed", "seed (bench: seed of repetition 0)");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "run one sequential design and write its trace (csv, json or all)");
    common(run_cmd, run_o);
    design(run_cmd, run_o);

    CLI::App* bench_cmd = app.add_subcommand("bench", "repeat runs per method and write the aggregate report (csv, svg, md or all)");
    common(bench_cmd, bench_o);
    design(bench_cmd, bench_o);
    bench_o.add(bench_cmd, "--reps", "reps", "repetitions per method");
    bench_o.add(bench_cmd, "--threads", "threads", "worker threads (0: all cores)");

    CLI::App* oracle_cmd = app.add_subcommand("oracle", "compute reference optima by grid search and polish");
    common(oracle_cmd, oracle_o);
    int grid = 0;
    oracle_cmd->add_option("--grid", grid, "grid points per axis (0: default)");

    CLI::App* report_cmd = app.add_subcommand("report", "re-aggregate stored trace JSON files");
    common(report_cmd, report_o);
    std::string traces_dir, reference;
    report_cmd->add_option("--traces", traces_dir, "directory of trace JSON files")->required();
    report_cmd->add_option("--reference", reference, "reference optimum f* (default: grid oracle)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("UsageError", e.what(), 2);
    }

    try {
        if (run_cmd->parsed()) return cmd_run(load_settings(config_path, run_o));
        if (bench_cmd->parsed()) return cmd_bench(load_settings(config_path, bench_o));
        if (oracle_cmd->parsed()) return cmd_oracle(load_settings(config_path, oracle_o), grid);
        if (report_cmd->parsed()) return cmd_report(load_settings(config_path, report_o), traces_dir, reference);
    } catch (const Error& e) {
        return fail(e.kind(), e.what(), 1);
    } catch (const std::exception& e) {
        return fail("InternalError", e.what(), 1);
    }
    return 0;
}
