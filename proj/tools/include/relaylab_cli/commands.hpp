// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace relaylab::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kConfigError = 2 };

/// Exact DoF tables. Also written to <out_dir>/dof_bounds.txt when given.
int cmd_dof_bounds(std::ostream& out, const std::optional<std::filesystem::path>& out_dir);

/// Alignment and cancellation residuals for extension length M over `seeds`
/// channel draws. perturb scales v_{2,1} by 1.1 to exercise the failure path.
int cmd_verify(int M, int seeds, bool perturb, std::ostream& out, std::ostream& err);

/// Writes results.csv, results.json and manifest.json into out_dir.
/// seed_override replaces the config's master_seed.
int cmd_simulate(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                 std::optional<std::uint64_t> seed_override, std::optional<int> workers,
                 std::ostream& out, std::ostream& err);

/// Vertices of the compound region for N antennas.
int cmd_region(int N, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. RELAYLAB_SEED is read from the environment.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relaylab::cli
