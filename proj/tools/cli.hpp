#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace projgraph::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kEnumerationCap = 3, kIo = 4 };

/// Runs the command line `args` (without the program name). CSV goes to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace projgraph::cli
