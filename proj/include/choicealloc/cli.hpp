#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace choicealloc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInvalidInput = 2,
  kNumericalFailure = 3,
  kParseError = 4,
  kSchemaError = 5,
};

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace choicealloc::cli
