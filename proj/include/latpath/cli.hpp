#pragma once

#include <string>
#include <vector>

namespace latpath::cli {

// Exit codes: 0 success, 1 usage, 2 parse/data, 3 resource.
int run(int argc, const char* const* argv);

// Convenience for tests: args without the program name.
int run(const std::vector<std::string>& args);

}  // namespace latpath::cli
