#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vgfit::cli {

enum ExitCode : int { kOk = 0, kIoError = 1, kUsage = 2, kInfeasible = 3 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vgfit::cli
