#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tangleforge::cli {

// Runs one CLI command. Exit codes: 0 success, 2 input error, 3 failed
// numerical audit.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tangleforge::cli
