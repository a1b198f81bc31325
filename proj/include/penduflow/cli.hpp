#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace penduflow {

/// Runs one command line (args[0] is the program name). Normal output goes
/// to `out`, diagnostics to `err`. Returns the process exit code: 0 on
/// success, 1 on runtime errors, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace penduflow
