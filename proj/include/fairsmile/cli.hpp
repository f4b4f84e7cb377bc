#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairsmile::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line (program name excluded). Tables go to `out` unless
// --output names a file; diagnostics and progress go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "1-20", "5,10,20" or "1-3,10" into a sorted, de-duplicated list.
[[nodiscard]] std::vector<int> parse_horizons(const std::string& text);

}  // namespace fairsmile::cli
