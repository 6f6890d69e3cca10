#pragma once

#include <string>
#include <vector>

namespace rotorkick::cli {

/// Exit codes: 0 success, 1 input error, 2 numerical failure.
int run(int argc, char** argv);

/// Same, with the arguments that follow the program name.
int run(const std::vector<std::string>& args);

}  // namespace rotorkick::cli
