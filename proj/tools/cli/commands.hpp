#pragma once

#include <ostream>

namespace optcbf::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // verification failure or unexpected error
  kExitSafetyViolation = 2,
  kExitInfeasible = 3,
  kExitConfigError = 4,
};

// Reads CBF_OPT_LOG (quiet, info or debug) and routes logging to stderr.
void init_logging();

// Full command-line entry point; `out` receives reports, `err` diagnostics.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace optcbf::cli
