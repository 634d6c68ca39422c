#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace musob::cli {

/// Runs one command. args excludes the program name. Returns the exit
/// code: 0 success, 1 input or library error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace musob::cli
