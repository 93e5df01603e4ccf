#pragma once

#include <iosfwd>

namespace congrulab {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInconclusive = 2,
  kExitHypothesis = 3,
  kExitUsage = 64,
};

/// Runs the congrulab command line. Results go to `out` (or --out), warnings
/// and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace congrulab
