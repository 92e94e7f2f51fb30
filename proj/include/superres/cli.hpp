#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace superres {

inline constexpr const char* kVersion = "1.0.0";

// "start:stop:count" (both ends included), a comma list, or a single value.
std::vector<double> parse_range(const std::string& text);

// Exit codes: 0 success, 1 usage error, 2 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace superres
