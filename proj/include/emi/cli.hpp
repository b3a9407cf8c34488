#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace emi::cli {

enum ExitCode : int { Success = 0, UsageError = 1, DataFailure = 2, NumericalFailure = 3 };

// Runs the command line `args` (without the program name). Diagnostics go to `err`,
// summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace emi::cli
