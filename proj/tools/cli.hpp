#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skycount::cli {

// Runs one CLI invocation (argv without the program name). Returns the
// process exit code; output goes to the given streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skycount::cli
