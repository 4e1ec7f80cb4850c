#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opgv::cli {

// Runs one CLI invocation (args without the program name). Returns the
// process exit code: 0 success/safe, 1 property violation, 2 usage or
// input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opgv::cli
