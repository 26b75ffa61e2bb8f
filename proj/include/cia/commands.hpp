#pragma once

// The `cia` command-line program: invariants, cia, sweep and verify.

#include <iosfwd>

namespace cia {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitInternal = 70;

/// Runs the program with the given arguments (argv[0] is the program name).
/// Normal output goes to `out`, diagnostics to `err`. Returns the exit code.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cia
