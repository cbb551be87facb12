// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

// SimConfig <-> JSON text. Missing keys keep their defaults; unknown keys and
// mistyped values are rejected with a ConfigError naming the key.

#pragma once

#include <filesystem>
#include <string>

#include "relaylab/simulator.hpp"

namespace relaylab::config {

sim::SimConfig parse_config(const std::string& text);
sim::SimConfig load_config(const std::filesystem::path& path);

/// Pretty-printed JSON holding every field; parse_config(serialize_config(c)) == c.
std::string serialize_config(const sim::SimConfig& cfg);

}  // namespace relaylab::config
