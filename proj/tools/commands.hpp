#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aim::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,      // I/O, schema, parse, validation, usage
  kNotConverged = 2,    // iterative RWR backend hit its iteration cap
  kUndefinedBias = 3,   // explain query has no comparable other-group evidence
  kClassTie = 4,        // exact label balance without --tie-majority
};

// Entry point shared by the `aim` binary and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aim::cli
