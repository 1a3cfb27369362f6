#include "slackal/trace_io.hpp"

#include "slackal/errors.hpp"

#include <json.hpp>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace slackal {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s.empty()) throw IOError("empty numeric field");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw IOError("malformed number '" + s + "'");
    return v;
}

namespace {

template <class Int>
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

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or(const json& j, double null_value) {
    return j.is_null() ? null_value : j.get<double>();
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

Vector vector_from(const json& a) {
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = number_or(a[i], std::numeric_limits<double>::quiet_NaN());
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IOError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path);
    if (!out) throw IOError("cannot open " + path.string() + " for writing");
    return out;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

void write_trace_csv(const Trace& t, std::ostream& out) {
    const int k = t.kinds.size();
    out << "# slackal-trace v" << trace_schema_version << '\n';
    out << "# problem=" << t.problem << '\n';
    out << "# method=" << t.method << '\n';
    out << "# seed=" << t.seed << '\n';
    out << "# n0=" << t.n0 << '\n';
    out << "# budget=" << t.budget << '\n';
    out << "# epsilon=" << format_double(t.epsilon) << '\n';
    out << "# dim=" << t.dim << '\n';
    out << "# inequalities=" << t.kinds.m() << '\n';
    out << "# equalities=" << t.kinds.p() << '\n';
    out << "# labels=" << join(t.constraint_labels, ';') << '\n';
    out << "# aborted=" << (t.aborted ? 1 : 0) << '\n';
    if (t.aborted) out << "# abort_reason=" << t.abort_reason << '\n';

    std::vector<std::string> head{"n", "initial"};
    for (int i = 1; i <= t.dim; ++i) head.push_back("x" + std::to_string(i));
    head.push_back("f");
    for (int j = 1; j <= k; ++j) head.push_back("c" + std::to_string(j));
    head.push_back("valid");
    for (int j = 1; j <= k; ++j) head.push_back("v" + std::to_string(j));
    for (int j = 1; j <= k; ++j) head.push_back("lambda" + std::to_string(j));
    for (const char* s : {"rho", "k", "incumbent", "best_valid_f", "acquisition", "wall_time"}) head.emplace_back(s);
    out << join(head, ',') << '\n';

    for (const TraceRecord& r : t.records) {
        std::vector<std::string> row{std::to_string(r.n), r.initial ? "1" : "0"};
        for (Eigen::Index i = 0; i < r.x.size(); ++i) row.push_back(format_double(r.x[i]));
        row.push_back(format_double(r.f));
        for (Eigen::Index j = 0; j < r.c.size(); ++j) row.push_back(format_double(r.c[j]));
        row.push_back(r.all_valid() ? "1" : "0");
        for (bool v : r.valid) row.push_back(v ? "1" : "0");
        for (Eigen::Index j = 0; j < r.lambda.size(); ++j) row.push_back(format_double(r.lambda[j]));
        row.push_back(format_double(r.rho));
        row.push_back(std::to_string(r.al_iteration));
        row.push_back(format_double(r.incumbent));
        row.push_back(format_double(r.best_valid_f));
        row.push_back(format_double(r.acquisition));
        row.push_back(format_double(r.wall_time));
        out << join(row, ',') << '\n';
    }
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    write_trace_csv(trace, out);
    if (!out) throw IOError("write failed: " + path.string());
}

Trace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open " + path.string());
    std::map<std::string, std::string> meta;
    std::string line;
    bool have_header = false;
    Trace t;
    int m = 0, p = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                key.erase(0, key.find_first_not_of(' '));
                meta[key] = line.substr(eq + 1);
            }
            continue;
        }
        if (!have_header) {
            have_header = true;
            try {
                t.problem = meta.at("problem");
                t.method = meta.at("method");
                t.seed = parse_integer<std::uint64_t>(meta.at("seed"));
                t.n0 = parse_integer<int>(meta.at("n0"));
                t.budget = parse_integer<int>(meta.at("budget"));
                t.epsilon = parse_double(meta.at("epsilon"));
                t.dim = parse_integer<int>(meta.at("dim"));
                m = parse_integer<int>(meta.at("inequalities"));
                p = parse_integer<int>(meta.at("equalities"));
            } catch (const std::out_of_range&) {
                throw IOError(path.string() + ": missing trace metadata");
            } catch (const IOError& e) {
                throw IOError(path.string() + ": malformed trace metadata: " + e.what());
            }
            t.kinds = ConstraintKinds(m, p);
            if (!meta["labels"].empty()) t.constraint_labels = split(meta["labels"], ';');
            t.aborted = meta["aborted"] == "1";
            t.abort_reason = meta["abort_reason"];
            const std::size_t expected = 2 + static_cast<std::size_t>(t.dim) + 1 + 3 * (m + p) + 1 + 6;
            if (split(line, ',').size() != expected) throw IOError(path.string() + ": unexpected column count");
            continue;
        }
        const auto f = split(line, ',');
        const int k = m + p;
        if (f.size() != 2 + static_cast<std::size_t>(t.dim) + 1 + 3 * k + 1 + 6)
            throw IOError(path.string() + ": malformed row");
        std::size_t at = 0;
        TraceRecord r;
        r.n = parse_integer<int>(f[at++]);
        r.initial = f[at++] == "1";
        r.x.resize(t.dim);
        for (int i = 0; i < t.dim; ++i) r.x[i] = parse_double(f[at++]);
        r.f = parse_double(f[at++]);
        r.c.resize(k);
        for (int j = 0; j < k; ++j) r.c[j] = parse_double(f[at++]);
        ++at;  // all-valid flag is derived
        for (int j = 0; j < k; ++j) r.valid.push_back(f[at++] == "1");
        r.lambda.resize(k);
        for (int j = 0; j < k; ++j) r.lambda[j] = parse_double(f[at++]);
        r.rho = parse_double(f[at++]);
        r.al_iteration = parse_integer<int>(f[at++]);
        r.incumbent = parse_double(f[at++]);
        r.best_valid_f = parse_double(f[at++]);
        r.acquisition = parse_double(f[at++]);
        r.wall_time = parse_double(f[at++]);
        t.records.push_back(std::move(r));
    }
    if (!have_header) throw IOError(path.string() + ": no trace header");
    return t;
}

std::string trace_to_json(const Trace& t, int indent) {
    json j;
    j["schema_version"] = trace_schema_version;
    j["problem"] = t.problem;
    j["method"] = t.method;
    j["seed"] = t.seed;
    j["n0"] = t.n0;
    j["budget"] = t.budget;
    j["epsilon"] = number(t.epsilon);
    j["dim"] = t.dim;
    j["inequalities"] = t.kinds.m();
    j["equalities"] = t.kinds.p();
    j["constraint_labels"] = t.constraint_labels;
    j["aborted"] = t.aborted;
    j["abort_reason"] = t.abort_reason;
    json records = json::array();
    for (const TraceRecord& r : t.records) {
        json jr;
        jr["n"] = r.n;
        jr["initial"] = r.initial;
        jr["x"] = vector_json(r.x);
        jr["f"] = number(r.f);
        jr["c"] = vector_json(r.c);
        jr["valid"] = r.valid;
        jr["lambda"] = vector_json(r.lambda);
        jr["rho"] = number(r.rho);
        jr["k"] = r.al_iteration;
        jr["incumbent"] = number(r.incumbent);
        jr["best_valid_f"] = number(r.best_valid_f);
        jr["acquisition"] = number(r.acquisition);
        jr["wall_time"] = number(r.wall_time);
        records.push_back(std::move(jr));
    }
    j["records"] = std::move(records);
    return j.dump(indent);
}

Trace trace_from_json(const std::string& text) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    Trace t;
    try {
        const json j = json::parse(text);
        if (j.at("schema_version").get<int>() != trace_schema_version)
            throw IOError("unsupported trace schema version " + j.at("schema_version").dump());
        t.problem = j.at("problem").get<std::string>();
        t.method = j.at("method").get<std::string>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.n0 = j.at("n0").get<int>();
        t.budget = j.at("budget").get<int>();
        t.epsilon = number_or(j.at("epsilon"), nan);
        t.dim = j.at("dim").get<int>();
        t.kinds = ConstraintKinds(j.at("inequalities").get<int>(), j.at("equalities").get<int>());
        t.constraint_labels = j.at("constraint_labels").get<std::vector<std::string>>();
        t.aborted = j.value("aborted", false);
        t.abort_reason = j.value("abort_reason", std::string());
        for (const json& jr : j.at("records")) {
            TraceRecord r;
            r.n = jr.at("n").get<int>();
            r.initial = jr.at("initial").get<bool>();
            r.x = vector_from(jr.at("x"));
            r.f = number_or(jr.at("f"), nan);
            r.c = vector_from(jr.at("c"));
            r.valid = jr.at("valid").get<std::vector<bool>>();
            r.lambda = vector_from(jr.at("lambda"));
            r.rho = number_or(jr.at("rho"), nan);
            r.al_iteration = jr.value("k", 0);
            r.incumbent = number_or(jr.at("incumbent"), nan);
            r.best_valid_f = number_or(jr.at("best_valid_f"), std::numeric_limits<double>::infinity());
            r.acquisition = number_or(jr.at("acquisition"), nan);
            r.wall_time = number_or(jr.at("wall_time"), nan);
            t.records.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw IOError(std::string("malformed trace JSON: ") + e.what());
    }
    return t;
}

void write_trace_json(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << trace_to_json(trace, 1) << '\n';
    if (!out) throw IOError("write failed: " + path.string());
}

Trace read_trace_json(const std::filesystem::path& path) { return trace_from_json(slurp(path)); }

} // namespace slackal
