#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace galmod::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kInvalidInput = 2,
  kInternalInconsistency = 3,
};

/// Runs the command line `args` (without the program name).
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace galmod::cli
