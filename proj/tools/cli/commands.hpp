// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <string>
#include <vector>

namespace vcli {

enum ExitCode : int { kOk = 0, kNotConverged = 1, kInvalid = 2, kInvariant = 3 };

// Runs `vortex <args...>` (args excludes the program name) and returns the exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace vcli
