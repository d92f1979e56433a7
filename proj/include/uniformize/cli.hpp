#pragma once

#include <string>
#include <vector>

namespace uniformize {

// Exit codes: 0 success, 2 usage/input, 3 construction infeasible,
// 4 verification failure.
int run_cli(const std::vector<std::string>& args);

} // namespace uniformize
