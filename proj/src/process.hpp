#pragma once

#include <optional>
#include <string>
#include <vector>

namespace postshot::detail {

struct ProcessResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

// Splits a command template into argv. Double quotes group words.
std::vector<std::string> split_command(const std::string& command);

// PATH lookup; returns the resolved executable or nullopt.
std::optional<std::string> find_executable(const std::string& name);

// Spawns argv[0] (already resolved) without a shell and collects both streams.
ProcessResult run_process(const std::vector<std::string>& argv);

}  // namespace postshot::detail
