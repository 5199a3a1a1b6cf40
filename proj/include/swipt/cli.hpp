#pragma once
#include <string>
#include <vector>

namespace swipt {

// Entry point shared by the binary and the tests.
// Exit codes: 0 ok, 1 usage/config error, 2 infeasible instance, 3 verify failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace swipt
