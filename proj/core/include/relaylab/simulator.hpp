// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

// Monte Carlo rate engine. Each trial owns the RNG streams keyed by
// (master_seed, trial, attempt), so results are identical at any worker count.
//
// One channel use is one slot of the pipelined full-duplex network (both
// hops active at once). Stream rates are log2(1 + SINR) with the SINR taken
// in closed form from the realized linear maps.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relaylab/channel_model.hpp"
#include "relaylab/ia_scheme.hpp"
#include "relaylab/rational.hpp"

namespace relaylab::sim {

enum class Scheme { symmetric_ia, baseline_111, caching_genie, caching_tdma };

std::string to_string(Scheme scheme);
/// Throws PreconditionError for unknown names.
Scheme parse_scheme(const std::string& name);

/// SINRs above this (including +inf in noiseless runs) are clamped.
inline constexpr double kSinrClamp = 1e30;

struct SimConfig {
  Scheme scheme = Scheme::symmetric_ia;
  int M = 1;
  std::vector<double> snr_grid_db{40.0, 50.0, 60.0, 70.0};
  int trials = 200;
  std::uint64_t master_seed = 1;
  double noise_power = 1.0;
  int relay1_antennas = 1;
  int relay2_antennas = 1;
  std::size_t message_bits = 1024;
  int workers = 1;
  int slope_points = 3;  ///< slope fit uses the top slope_points grid points
  int max_resamples = 10000;
  ia::InitPolicy init = ia::InitPolicy::equilibrated;
  ia::Tolerances tolerances;
  channel::ChannelConfig channel;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  int points = 0;

  friend bool operator==(const SlopeFit&, const SlopeFit&) = default;
};

/// Ordinary least squares of sum rate against log2(P), P = 10^(snr_db/10).
/// Needs >= 3 points with strictly increasing SNR.
SlopeFit fit_dof_slope(std::span<const std::pair<double, double>> points);

struct SnrPoint {
  double snr_db = 0.0;
  double mean_sum_rate = 0.0;            ///< bits per channel use
  std::vector<double> per_stream_rate;   ///< bits per channel use
  int trials = 0;

  friend bool operator==(const SnrPoint&, const SnrPoint&) = default;
};

struct SimResult {
  Scheme scheme = Scheme::symmetric_ia;
  int M = 1;
  std::vector<SnrPoint> points;
  std::optional<SlopeFit> slope;  ///< only with >= 3 grid points
  long resamples = 0;
  bool rates_clamped = false;

  /// Symbol-level noiseless check (noise_power == 0 runs only).
  std::optional<double> max_decode_error;
  bool decode_check_passed = true;
  std::optional<double> max_self_interference_residual;  ///< baseline only

  std::optional<Rational> nominal_dof;  ///< caching schemes
  bool analytic_rate = false;
  bool messages_recovered = true;
  std::size_t cache_bits_per_relay = 0;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Channels and beamformers of one data block: uplink block n, downlink
/// block n + 1 (the relays forward one block later).
struct BlockSetup {
  channel::UplinkChannels up;
  channel::DownlinkChannels down;
  ia::BeamformerSet beamformers;
};

/// Throws ConditioningError / SingularChannelError for realizations the
/// scheme has to skip.
BlockSetup prepare_block(const channel::ChannelRealization& r, int M, int data_block,
                         ia::InitPolicy init, const ia::Tolerances& tol,
                         std::uint64_t init_key = 0);

struct PipelineReport {
  int blocks = 0;
  double max_relative_error = 0.0;
  std::vector<ia::SymbolBlock> sent;
  std::vector<std::array<ia::DecodedBlock, 4>> decoded;
};

/// Runs `num_blocks` data blocks through the causal two-hop pipeline: in time
/// block n the sources send data block n while the relays forward what they
/// received in block n - 1 (silent in block 0). Needs (num_blocks + 1) M slots.
PipelineReport run_pipeline(const channel::ChannelRealization& r, int M, int num_blocks,
                            double P, double noise_power, ia::InitPolicy init,
                            const ia::Tolerances& tol, std::uint64_t key);

SimResult run_symmetric_ia(const SimConfig& cfg);
SimResult run_baseline_111(const SimConfig& cfg);
SimResult run_caching(const SimConfig& cfg);
/// Dispatches on cfg.scheme.
SimResult run(const SimConfig& cfg);

/// Order-fixed pairwise summation.
double pairwise_sum(std::span<const double> values);

}  // namespace relaylab::sim
