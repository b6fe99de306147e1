#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace boldcal {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitSuccess = 0,  ///< also used when the analysis completed with warnings
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

/// Runs the `boldcal` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace boldcal
