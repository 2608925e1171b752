#pragma once

#include <iosfwd>

namespace drs {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitGeneric = 1,
  kExitValidation = 2,
  kExitNoConvergence = 3,
  kExitSampler = 4,
};

/// Entry point of `drsest`. Data (or the path written) goes to `out`,
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace drs
