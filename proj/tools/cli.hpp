#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace balkit {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumerical = 3, kExitIo = 4 };

/// Runs one command; args excludes the program name. Errors are reported
/// as a single JSON line on err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace balkit
