#pragma once

#include "slackal/bench.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace slackal {

// "key = value" per line; '#' starts a comment; blank lines are ignored.
// Keys are case-sensitive and may appear once.
using KeyValues = std::map<std::string, std::string>;

[[nodiscard]] KeyValues parse_config(const std::string& text);
[[nodiscard]] KeyValues read_config_file(const std::filesystem::path& path);

// Settings shared by the command-line subcommands.
struct Settings {
    BenchConfig bench;  // bench.base holds the single-run settings; bench.methods[0] is the run method
    std::string out_dir = "out";
    std::string format = "all";
};

// Applies every key to settings; unknown keys and bad values raise ConfigError.
void apply_config(const KeyValues& values, Settings& settings);
[[nodiscard]] std::vector<std::string> config_keys();

[[nodiscard]] std::vector<Method> parse_method_list(const std::string& text);

} // namespace slackal
