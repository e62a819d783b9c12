#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mktool {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kData = 3,
  kNumeric = 4,
};

/// Parse `args` (without the program name) and run the selected subcommand.
/// Diagnostics go to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mktool
