#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qica::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;
inline constexpr int kUsage = 2;
inline constexpr int kResource = 3;

/// Runs one command. args excludes the program name. Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qica::cli
