#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brenier::cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2 };

/// Runs the command line `args` (without the program name). Reports go to
/// the files named by --out, or to `out` when none is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brenier::cli
