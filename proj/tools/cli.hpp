#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hdt::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // verification or protocol failure
  kUsage = 2,
  kIoError = 3,  // unreadable file or parse error
};

/// Runs one command line (without the program name). The first line written
/// to `out` is "OK" or "FAIL <reason-tag>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hdt::cli
