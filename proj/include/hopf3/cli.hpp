#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hopf3 {

enum ExitCode : int { kExitOk = 0, kExitFalsified = 1, kExitInvalidInput = 2, kExitResource = 3 };

/// Runs the command line `args` (without the program name) and returns the
/// process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hopf3
