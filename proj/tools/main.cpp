// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include <string>
#include <vector>

#include "cli/commands.hpp"

int main(int argc, char** argv) { return vcli::run_cli(std::vector<std::string>(argv + 1, argv + argc)); }
