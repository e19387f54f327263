#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsik::cli {

enum ExitCode : int {
  kExitSolved = 0,
  kExitUsage = 1,
  kExitUnreachable = 2,
  kExitFailed = 3,
};

// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fsik::cli
