#pragma once

#include <string>
#include <vector>

namespace nirb {

// Runs one CLI invocation. Exit codes: 0 success, 1 usage error, 2 numerical
// failure.
int dispatch(const std::vector<std::string>& args);

}  // namespace nirb
