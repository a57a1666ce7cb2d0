#pragma once

#include <iosfwd>

namespace jaqm::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kAssumption = 3,
  kNumeric = 4,
  kCheckFailed = 5,
};

/// Entry point of the `jaqm` tool, with injectable streams for tests.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jaqm::cli
