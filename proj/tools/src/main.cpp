// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "relaylab_cli/commands.hpp"

int main(int argc, char** argv) { return relaylab::cli::run(argc, argv, std::cout, std::cerr); }
