#include "slackal/config_file.hpp"
#include "slackal/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace slackal;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("config text parsing") {
    const KeyValues kv = parse_config("# comment\n\nproblem = gsbp  # trailing\n  budget=60\r\nmethod = efi, slack-al-ei\n");
    CHECK(kv.size() == 3);
    CHECK(kv.at("problem") == "gsbp");
    CHECK(kv.at("budget") == "60");
    CHECK(kv.at("method") == "efi, slack-al-ei");
    CHECK(parse_config("").empty());
    CHECK(parse_config("key =\n").at("key").empty());

    CHECK(error_of("a = 1\nno equals here\n").find("line 2") != std::string::npos);
    CHECK(error_of(" = 3\n").find("empty key") != std::string::npos);
    const std::string dup = error_of("a = 1\n# x\na = 2\n");
    CHECK(dup.find("line 3") != std::string::npos);
    CHECK(dup.find("duplicate key 'a'") != std::string::npos);
}

TEST_CASE("config files") {
    const fs::path dir = fs::temp_directory_path() / "slackal_config_test";
    fs::remove_all(dir);
    CHECK_THROWS_AS((void)read_config_file(dir / "missing.cfg"), IOError);
    fs::create_directories(dir);
    std::ofstream(dir / "run.cfg") << "problem = lah\nn0 = 8\n";
    const KeyValues kv = read_config_file(dir / "run.cfg");
    CHECK(kv.at("problem") == "lah");
    CHECK(kv.at("n0") == "8");
    fs::remove_all(dir);
}

TEST_CASE("every key applies") {
    const KeyValues kv = {{"problem", "gsbp"},
                          {"method", "efi,orig-al-ei-mc"},
                          {"budget", "60"},
                          {"n0", "12"},
                          {"reps", "4"},
                          {"seed", "18446744073709551615"},
                          {"epsilon", "0.02"},
                          {"out_dir", "res"},
                          {"format", "svg"},
                          {"gsbp_variant", "printed"},
                          {"printed_orientation", "Yes"},
                          {"candidate_count", "500"},
                          {"polish_budget", "77"},
                          {"node_count", "33"},
                          {"inversion_tolerance", "1e-7"},
                          {"max_inversion_terms", "90"},
                          {"quadrature", "direct"},
                          {"gp_restarts", "3"},
                          {"mc_samples", "2000"},
                          {"fallback", "w-min"},
                          {"optimality_threshold", "0.05"},
                          {"threads", "2"},
                          {"reference_grid", "301"},
                          {"test_points", "20, 60"}};
    CHECK(kv.size() == config_keys().size());
    Settings s;
    apply_config(kv, s);
    const RunConfig& b = s.bench.base;
    CHECK(b.problem == "gsbp");
    CHECK(s.bench.methods == std::vector<Method>{Method::Efi, Method::OrigAlEiMc});
    CHECK(b.method == Method::Efi);
    CHECK(b.budget == 60);
    CHECK(b.n0 == 12);
    CHECK(s.bench.reps == 4);
    CHECK(b.seed == 18446744073709551615ull);
    CHECK(s.bench.seed_base == b.seed);
    CHECK(b.epsilon == 0.02);
    CHECK(s.out_dir == "res");
    CHECK(s.format == "svg");
    CHECK(b.problem_options.gsbp_variant == "printed");
    CHECK(b.problem_options.printed_orientation);
    CHECK(b.proposal.candidate_count == 500);
    CHECK(b.proposal.polish_budget == 77);
    CHECK(b.quad.node_count == 33);
    CHECK(b.quad.inversion_tolerance == 1e-7);
    CHECK(b.quad.max_inversion_terms == 90);
    CHECK(b.quad.method == QuadratureMethod::Direct);
    CHECK(b.gp.restarts == 3);
    CHECK(b.mc_samples == 2000);
    CHECK(b.fallback == FallbackRule::WMin);
    CHECK(s.bench.optimality_threshold == 0.05);
    CHECK(s.bench.threads == 2);
    CHECK(s.bench.reference_grid == 301);
    CHECK(s.bench.test_points == std::vector<int>{20, 60});
}

TEST_CASE("bad keys and values") {
    Settings s;
    CHECK_THROWS_AS(apply_config({{"budgett", "3"}}, s), ConfigError);
    for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{{"budget", "ten"},
                                                                               {"budget", "12.5"},
                                                                               {"budget", "99999999999"},
                                                                               {"seed", "-1"},
                                                                               {"epsilon", "0.1x"},
                                                                               {"printed_orientation", "maybe"},
                                                                               {"quadrature", "simpson"},
                                                                               {"fallback", "none"},
                                                                               {"gsbp_variant", "other"},
                                                                               {"method", "pesc"},
                                                                               {"method", " , "},
                                                                               {"test_points", "5,x"}}) {
        CAPTURE(k);
        CAPTURE(v);
        CHECK_THROWS_AS(apply_config({{k, v}}, s), ConfigError);
    }
}

TEST_CASE("method lists") {
    CHECK(parse_method_list("all") == all_methods());
    CHECK(parse_method_list(" slack-al-ei-optim ,efi") == std::vector<Method>{Method::SlackAlEiOptim, Method::Efi});
    CHECK(parse_method_list("efi,efi").size() == 2);
    CHECK_THROWS_AS((void)parse_method_list(""), ConfigError);
    CHECK_THROWS_AS((void)parse_method_list("efi,bogus"), ConfigError);
}
