#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace postshot::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Runs the command line `args` (args[0] is the program name).
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// Rewrites `args` so that every key in the `--config` file replaces the
// same option given on the command line. Throws Error{InvalidConfig}.
std::vector<std::string> apply_config_file(std::vector<std::string> args);

}  // namespace postshot::cli
