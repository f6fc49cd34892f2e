#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cvxtau::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kInvalidMeasure = 3,
  kDegenerate = 4,
  kViolation = 5,
};

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvxtau::cli
