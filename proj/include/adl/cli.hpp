#pragma once

#include <string>
#include <vector>

namespace adl::cli {

// Exit codes: 0 when every gate passes, 1 on a gate failure, 2 on a usage error.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace adl::cli
