#pragma once

#include <string>
#include <vector>

namespace fracmix::cli {

// Runs one CLI invocation. argv excludes the program name. Returns the exit
// code: 0 on success, 1 on validation errors, 2 on numerical-budget failures.
int run(const std::vector<std::string>& argv);

}  // namespace fracmix::cli
