#pragma once

#include "slackal/driver.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace slackal {

inline constexpr int trace_schema_version = 1;

// CSV: '#' metadata lines, then one row per evaluation with columns
//   n, initial, x1..xd, f, c1..ck, valid, v1..vk, lambda1..lambdak, rho,
//   incumbent, best_valid_f, acquisition, wall_time
// Doubles are written with 17 significant digits; non-finite values as
// inf/-inf/nan.
void write_trace_csv(const Trace& trace, std::ostream& out);
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);
[[nodiscard]] Trace read_trace_csv(const std::filesystem::path& path);

// JSON with full metadata; non-finite numbers become null. On reading, a null
// best_valid_f means +infinity and other nulls mean NaN.
[[nodiscard]] std::string trace_to_json(const Trace& trace, int indent = -1);
[[nodiscard]] Trace trace_from_json(const std::string& text);
void write_trace_json(const Trace& trace, const std::filesystem::path& path);
[[nodiscard]] Trace read_trace_json(const std::filesystem::path& path);

// %.17g, with inf/-inf/nan spelled out.
[[nodiscard]] std::string format_double(double v);
[[nodiscard]] double parse_double(const std::string& s);

} // namespace slackal
