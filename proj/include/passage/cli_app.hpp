#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace passage {

// Command line front end: parses `args` (program name excluded), writes
// results to `out` and diagnostics to `err`. Returns the process exit code:
// 0 success, 1 verification failure, 2 usage or domain error, 3 numerical
// non-convergence or simulation breakdown.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace passage
