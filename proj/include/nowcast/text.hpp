#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nowcast {

// Shortest round-trip decimal representation; deterministic across runs.
std::string format_double(double value);
// Fixed number of decimals.
std::string format_fixed(double value, int decimals);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

} // namespace nowcast
