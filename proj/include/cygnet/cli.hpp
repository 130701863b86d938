#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cygnet {

/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name; args[0] is the
/// subcommand (prepare, stats, synth, train, eval, ablate, sweep-alpha,
/// predict). Errors are reported on `err` as a single line
/// `error: <kind>: <message>`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cygnet
