#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ureach {

/// Runs the `ureach` command line (args exclude the program name).
/// Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ureach
