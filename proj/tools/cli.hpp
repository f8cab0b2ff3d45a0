#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gpentropy::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kBadInput = 2,
  kSingular = 3,
  kNumerical = 4,
  kSizeLimit = 5,
};

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless --out is given; errors go to `err` as one JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gpentropy::cli
