#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace patchnet {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitRuntime = 3 };

/// Runs the command line `args` (without the program name). Human-readable
/// diagnostics go to `out`/`err`; data goes to the files named by flags.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace patchnet
