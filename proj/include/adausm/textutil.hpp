#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace adausm {

// Shortest decimal form that parses back to the identical double. Used for
// every float we persist (traces, configs, snapshots) so that output files
// are byte-stable and round-trippable.
std::string fmt_double(double v);
std::string fmt_int(std::int64_t v);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// Strict whole-token parses: leading/trailing junk makes them return false.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, std::int64_t& out);
bool parse_uint(std::string_view s, std::uint64_t& out);

}  // namespace adausm
