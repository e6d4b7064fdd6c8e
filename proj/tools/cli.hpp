#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lta::cli {

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit status: 0 when the requested artifact was written, 1 on a
/// runtime failure, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lta::cli
