// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

// Result persistence. The CSV carries no timestamps or paths so repeated runs
// are byte-identical; the manifest holds everything run-specific.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "relaylab/simulator.hpp"

namespace relaylab::report {

inline constexpr const char* kCsvHeader =
    "scheme,M,snr_db,trials,sum_rate_bits,slope_estimate,slope_stderr,resamples";

/// Header plus one row per SNR point. Slope columns are empty without a fit.
std::string to_csv(const sim::SimResult& result);

/// CSV columns plus per-stream rate arrays and the scheme diagnostics.
std::string to_json(const sim::SimResult& result);

/// Shortest round-trip decimal form of a double (deterministic).
std::string format_double(double value);

std::string library_version();

struct RunManifest {
  sim::SimConfig config;
  std::string tool_version;
  std::string timestamp;  ///< UTC, ISO 8601
  std::uint64_t master_seed = 0;
  std::vector<std::filesystem::path> outputs;

  std::string to_json() const;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Writes `text` to `path`; throws Error when the path
/// cannot be written.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace relaylab::report
