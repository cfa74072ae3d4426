#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optostirling {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitGeometry = 3, kExitNotEngine = 4 };

// Entry point of the command-line tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optostirling
