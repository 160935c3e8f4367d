#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace consctl::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int {
  kPositive = 0,
  kNegative = 1,
  kInputError = 2,
  kLimitReached = 3,
};

/// Runs one command line (without the program name). Text goes to `out`,
/// diagnostics to `err`; the JSON report goes to the --json target.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace consctl::cli
