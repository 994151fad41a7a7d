#pragma once

#include <iosfwd>

namespace simtlab::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kUsage = 2,
  kInfeasible = 3,
  kIoError = 4,
};

/// Entry point of the simtlab tool, with the streams injectable for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace simtlab::cli
