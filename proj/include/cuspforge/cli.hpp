#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cuspforge {

// Entry point of the command line tool, callable in process for tests.
// Subcommands: solve, sweep, classify, verify.  Returns the process exit
// code: 0 success, 1 input error, 2 solver failure, 3 trace data admitting no
// consistent classification.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cuspforge
