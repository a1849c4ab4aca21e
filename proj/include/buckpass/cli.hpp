#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace buckpass {

// Full command-line front end. Returns the process exit code:
//   0 success, 1 internal-consistency failure, 2 input/usage validation error.
// Reports go to `out`, diagnostics to `err`; tests drive this in-process.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace buckpass
