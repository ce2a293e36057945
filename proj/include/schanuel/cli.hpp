#pragma once

#include <ostream>

namespace schanuel {

enum ExitCode : int {
  kExitOk = 0,
  kExitCounterexample = 1,
  kExitUnknown = 2,
  kExitUsage = 3,
  kExitObligation = 4,
};

/// The `schanuel` command line. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace schanuel
