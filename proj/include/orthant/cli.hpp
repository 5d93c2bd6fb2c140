#pragma once

#include <string>
#include <vector>

namespace orthant {

// Runs one CLI invocation (arguments without the program name) and returns
// the process exit code: 0 success, 2 usage error, 1 computation error (a
// machine-readable JSON error line goes to stderr).
int dispatch(const std::vector<std::string>& args);

}  // namespace orthant
