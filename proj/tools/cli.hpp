#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mpcc {

inline constexpr const char* kVersion = "1.0.0";

/// args excludes the program name. Exit codes: 0 success, 1 usage or parse error, 2 infeasible.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpcc
