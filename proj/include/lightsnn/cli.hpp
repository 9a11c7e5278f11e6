#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lightsnn {

/// Exit codes: 0 success, 1 usage error, 2 data or format error.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Entry point of the `lightsnn` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lightsnn
