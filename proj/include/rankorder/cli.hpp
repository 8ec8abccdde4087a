#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankorder::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kParse = 2,
  kContract = 3,
  kResolutionCap = 4,
};

// Runs one command line (without the program name). FILE arguments of "-"
// read from `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace rankorder::cli
