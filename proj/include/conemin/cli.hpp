#pragma once

// Command-line front end. run_cli is the whole program behind a thin
// main(), so tests can drive it in-process with captured streams.

#include <iosfwd>
#include <string>
#include <vector>

namespace conemin {

// args excludes the program name. Writes the JSON result to out and
// diagnostics to err. Returns the process exit code: 0 solved/feasible,
// 1 infeasible, 2 usage or input error, 3 internal invariant violation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conemin
