#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robocontract::cli {

enum ExitCode : int {
  kOk = 0,
  kError = 1,
  kConfigError = 2,
  kVerifierFailure = 3,
  kInfeasible = 4,
};

/// Environment variable naming the root for timestamped default output dirs.
inline constexpr const char* kOutputRootEnv = "ROBOCONTRACT_OUT";

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats a menu as "(5.0, 7.5, 10.0)": two decimals, trailing zeros trimmed to one.
std::string format_menu(const std::vector<double>& prices);

}  // namespace robocontract::cli
