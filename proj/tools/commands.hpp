#pragma once

#include <string>
#include <vector>

#include "cli.hpp"

namespace rydmagic::cli {

const std::vector<std::string>& command_names();

// Reads the command's keys, seals the context and runs it. Returns the process exit code.
int run_command(RunContext& ctx);

}  // namespace rydmagic::cli
