#pragma once

// Command-line driver: gen, solve, verify, bench.

namespace regret_pricer::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,        // unexpected internal or numerical error
  kInvalidInput = 2,
  kSolverLimit = 3,
  kVerifyFailed = 4,
};

// Parses argv, runs the subcommand and returns the process exit code.
// Results go to stdout (or --out), diagnostics to stderr.
int run(int argc, const char* const* argv);

}  // namespace regret_pricer::cli
