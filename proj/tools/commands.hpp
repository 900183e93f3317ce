#pragma once

#include <string>
#include <vector>

namespace nlac::cli {

// Parses argv and runs one subcommand. Returns 0 on success, 1 on usage or
// configuration errors, 2 on a numerical failure (after writing the last
// good state and printing its path).
int run_command(int argc, const char* const* argv);
int run_command(const std::vector<std::string>& args);

}  // namespace nlac::cli
