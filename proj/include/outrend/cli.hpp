#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace outrend {

/// Exit codes of the command-line tool.
enum CliExit : int {
    kOk = 0,
    kFailure = 1,     // unexpected runtime failure
    kUsageError = 2,  // bad flags or parameter validation
    kDataError = 3,   // malformed input data
    kInfeasible = 4,  // point query in an infeasible parameter region
};

/// Parses and runs one CLI invocation. `args` excludes the program name.
/// Results go to `out` (or the --output file), diagnostics to `err`.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace outrend
