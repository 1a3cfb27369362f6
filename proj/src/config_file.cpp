#include "slackal/config_file.hpp"

#include "slackal/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace slackal {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size() || x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
            throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

using Setter = std::function<void(Settings&, const std::string& key, const std::string& value)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"problem", [](Settings& s, auto&, auto& v) { s.bench.base.problem = v; }},
        {"method", [](Settings& s, auto&, auto& v) { s.bench.methods = parse_method_list(v); }},
        {"budget", [](Settings& s, auto& k, auto& v) { s.bench.base.budget = to_int(k, v); }},
        {"n0", [](Settings& s, auto& k, auto& v) { s.bench.base.n0 = to_int(k, v); }},
        {"reps", [](Settings& s, auto& k, auto& v) { s.bench.reps = to_int(k, v); }},
        {"seed", [](Settings& s, auto& k, auto& v) { s.bench.base.seed = s.bench.seed_base = to_u64(k, v); }},
        {"epsilon", [](Settings& s, auto& k, auto& v) { s.bench.base.epsilon = to_double(k, v); }},
        {"out_dir", [](Settings& s, auto&, auto& v) { s.out_dir = v; }},
        {"format", [](Settings& s, auto&, auto& v) { s.format = v; }},
        {"gsbp_variant",
         [](Settings& s, auto& k, auto& v) {
             if (v != "prose" && v != "printed") throw ConfigError("key '" + k + "': expected prose or printed");
             s.bench.base.problem_options.gsbp_variant = v;
         }},
        {"printed_orientation",
         [](Settings& s, auto& k, auto& v) { s.bench.base.problem_options.printed_orientation = to_bool(k, v); }},
        {"candidate_count", [](Settings& s, auto& k, auto& v) { s.bench.base.proposal.candidate_count = to_int(k, v); }},
        {"polish_budget", [](Settings& s, auto& k, auto& v) { s.bench.base.proposal.polish_budget = to_int(k, v); }},
        {"node_count", [](Settings& s, auto& k, auto& v) { s.bench.base.quad.node_count = to_int(k, v); }},
        {"inversion_tolerance",
         [](Settings& s, auto& k, auto& v) { s.bench.base.quad.inversion_tolerance = to_double(k, v); }},
        {"max_inversion_terms",
         [](Settings& s, auto& k, auto& v) { s.bench.base.quad.max_inversion_terms = to_int(k, v); }},
        {"quadrature",
         [](Settings& s, auto& k, auto& v) {
             if (v == "direct") s.bench.base.quad.method = QuadratureMethod::Direct;
             else if (v == "trapezoid") s.bench.base.quad.method = QuadratureMethod::Trapezoid;
             else throw ConfigError("key '" + k + "': expected direct or trapezoid");
         }},
        {"gp_restarts", [](Settings& s, auto& k, auto& v) { s.bench.base.gp.restarts = to_int(k, v); }},
        {"mc_samples", [](Settings& s, auto& k, auto& v) { s.bench.base.mc_samples = to_int(k, v); }},
        {"fallback",
         [](Settings& s, auto& k, auto& v) {
             if (v == "composite-mean") s.bench.base.fallback = FallbackRule::CompositeMean;
             else if (v == "w-min") s.bench.base.fallback = FallbackRule::WMin;
             else throw ConfigError("key '" + k + "': expected composite-mean or w-min");
         }},
        {"optimality_threshold",
         [](Settings& s, auto& k, auto& v) { s.bench.optimality_threshold = to_double(k, v); }},
        {"threads", [](Settings& s, auto& k, auto& v) { s.bench.threads = to_int(k, v); }},
        {"reference_grid", [](Settings& s, auto& k, auto& v) { s.bench.reference_grid = to_int(k, v); }},
        {"test_points",
         [](Settings& s, auto& k, auto& v) {
             s.bench.test_points.clear();
             for (const std::string& item : split_list(v)) s.bench.test_points.push_back(to_int(k, item));
         }},
    };
    return table;
}

} // namespace

KeyValues parse_config(const std::string& text) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
        if (!out.emplace(key, value).second)
            throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_config(const KeyValues& values, Settings& settings) {
    const auto& table = setters();
    for (const auto& [key, value] : values) {
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
        if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
        it->second(settings, key, value);
    }
    if (!settings.bench.methods.empty()) settings.bench.base.method = settings.bench.methods.front();
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& e : setters()) keys.push_back(e.first);
    return keys;
}

std::vector<Method> parse_method_list(const std::string& text) {
    std::vector<Method> out;
    for (const std::string& name : split_list(text)) {
        if (name == "all") {
            for (Method m : all_methods()) out.push_back(m);
        } else {
            out.push_back(parse_method(name));
        }
    }
    if (out.empty()) throw ConfigError("method list is empty");
    return out;
}

} // namespace slackal
