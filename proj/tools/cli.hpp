#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sieve::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitNotConverged = 3;

// Entry point behind the `sieve` binary. args excludes the program name.
// Subcommands: fit, predict, simulate, index, bench.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sieve::cli
