#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace elmsol::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elmsol::cli
