#pragma once

#include <string>
#include <vector>

namespace ctr {

// Entry point shared by the ctr binary and the in-process CLI tests.
// Exit codes: 0 success, 1 domain error, 2 usage error.
int run_command(const std::vector<std::string>& args);

}  // namespace ctr
