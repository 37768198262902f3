#pragma once

#include <iosfwd>

namespace blochsim::cli {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalAbort = 3 };

/// Parses the command line and dispatches a subcommand. Returns the process
/// exit code; diagnostics go to `err`, results and summaries to `out`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace blochsim::cli
