#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdos::doscli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalid = 2,  // config or parameter validation
  kExitFormat = 3,   // malformed input files or stage inputs
  kExitDrift = 4,    // `validate` found manifest/file drift
};

// Entry point of the doscli tool; args excludes the program name. Results
// go to `out` as one JSON object, failures to `err` as a JSON error report.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qdos::doscli
