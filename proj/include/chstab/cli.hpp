#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chstab::cli {

/// Command-line entry point; `args` excludes the program name.
/// Subcommands: certify, simulate, sweep, kernel, resolvent.
/// Exit codes: 0 success; 1 usage, input, or I/O error; 2 certificate not
/// admissible (certify); 3 a certified sup-norm ceiling was exceeded during a
/// run (simulate), which contradicts the certificate and should never happen.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace chstab::cli
