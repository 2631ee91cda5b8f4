#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace confmetric::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitSolver = 70;

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace confmetric::cli
