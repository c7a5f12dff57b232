#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rscavity::cli {

/// Runs one command line (without the program name). Returns the exit code:
/// 0 ok, 2 input error, 3 resource cap, 4 invariant failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rscavity::cli
