// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "core/report.hpp"

namespace gf {

inline constexpr const char* kVersion = "0.1.0";

// Runs one pipeline command. Parameters are validated before any computation.
// The result holds "status" ("ok" or "budget"), "text" (console summary),
// "result" (structured values), "artifacts" (file name -> contents) and "manifest".
json run_command(const std::string& command, const json& params);

// Command names accepted by run_command.
std::vector<std::string> command_names();

}  // namespace gf
