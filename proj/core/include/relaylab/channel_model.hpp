// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

// Two-way 2x2x2 relay network: topology, bounded random channels, M-symbol
// extensions and the two hop equations.
//
// Node numbering follows the usual convention: sources S_1..S_4 (1-based),
// relays R_1, R_2 (1-based), destinations D_1..D_4 (1-based). Slots are
// 0-based; block n of an M-extension covers slots M*n .. M*n + M - 1, so the
// k-th (1-based) diagonal entry of a block is slot M*n + k - 1.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace relaylab::channel {

using ComplexGain = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kNumSources = 4;
inline constexpr int kNumRelays = 2;

/// One scalar link of the network.
struct Link {
  enum class Hop { uplink, downlink };

  Hop hop = Hop::uplink;
  int node = 1;   ///< source index (uplink) or destination index (downlink)
  int relay = 1;

  static Link up(int source, int relay);
  static Link down(int relay, int destination);

  /// Dense id in [0, 16): uplinks first.
  int id() const noexcept;
  /// Class representative under the two-way symmetry (1<->3, 2<->4).
  Link symmetric_representative() const noexcept;
  std::string name() const;

  friend bool operator==(const Link&, const Link&) = default;
};

struct ChannelConfig {
  double h_min = 0.05;
  double h_max = 20.0;
  std::uint64_t max_retries = 1'000'000;
  /// Entries below this magnitude are treated as degenerate and resampled.
  double degenerate_floor = 1e-6;

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

class NetworkTopology {
 public:
  explicit NetworkTopology(int relay1_antennas = 1, int relay2_antennas = 1);

  int num_sources() const noexcept { return kNumSources; }
  int num_relays() const noexcept { return kNumRelays; }
  std::pair<int, int> relay_antennas() const noexcept { return antennas_; }

  /// D_1 = S_3, D_3 = S_1, D_2 = S_4, D_4 = S_2.
  const std::map<int, int>& colocation() const noexcept { return colocation_; }
  int colocated_source(int destination) const;

 private:
  std::pair<int, int> antennas_;
  std::map<int, int> colocation_;
};

/// All per-slot complex gains of one network realization. Immutable.
class ChannelRealization {
 public:
  using GainFunction = std::function<ComplexGain(const Link&, int slot)>;

  /// Builds a realization from an explicit gain function (tests, fixtures).
  /// If `symmetric` is set the function is only queried for class
  /// representatives.
  static ChannelRealization from_function(int num_slots, bool symmetric,
                                          const GainFunction& gain,
                                          std::uint64_t seed = 0);
  static ChannelRealization constant(int num_slots, ComplexGain g);

  ComplexGain gain(const Link& link, int slot) const;
  int num_slots() const noexcept { return num_slots_; }
  bool symmetric() const noexcept { return symmetric_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// True iff the four pairwise symmetry equalities hold bit-exactly.
  bool satisfies_symmetry() const;

  friend bool operator==(const ChannelRealization&, const ChannelRealization&) = default;

 private:
  ChannelRealization(int num_slots, bool symmetric, std::uint64_t seed);

  int num_slots_ = 0;
  bool symmetric_ = false;
  std::uint64_t seed_ = 0;
  std::vector<ComplexGain> gains_;  // [link id][slot]
};

/// Circularly symmetric Gaussian gains, rejection-resampled into
/// [h_min, h_max]; deterministic in `seed`.
ChannelRealization sample_realization(std::uint64_t seed, bool symmetric, int num_slots,
                                      const ChannelConfig& config = {});

/// M x M diagonal channel of an M-symbol extension. Off-diagonal entries are
/// zero by construction since only the diagonal is stored.
class DiagonalExtendedMatrix {
 public:
  DiagonalExtendedMatrix() = default;
  explicit DiagonalExtendedMatrix(ComplexVector diagonal);
  static DiagonalExtendedMatrix identity(int M);

  int extension_length() const noexcept { return static_cast<int>(diagonal_.size()); }
  const ComplexVector& diagonal() const noexcept { return diagonal_; }
  ComplexGain operator()(int k) const { return diagonal_(k); }

  ComplexVector apply(const ComplexVector& x) const;
  Eigen::MatrixXcd dense() const;

  double min_magnitude() const;
  bool invertible(double floor) const { return min_magnitude() > floor; }
  /// Throws SingularChannelError when an entry is at or below `floor`.
  DiagonalExtendedMatrix inverse(double floor) const;

  friend DiagonalExtendedMatrix operator*(const DiagonalExtendedMatrix& a,
                                          const DiagonalExtendedMatrix& b);
  friend bool operator==(const DiagonalExtendedMatrix& a, const DiagonalExtendedMatrix& b) {
    return a.diagonal_ == b.diagonal_;
  }

 private:
  ComplexVector diagonal_;
};

DiagonalExtendedMatrix extend_channel(const ChannelRealization& r, const Link& link,
                                      int block_index, int M);

/// Extended uplink channels of one block, indexed (source, relay), 1-based.
class UplinkChannels {
 public:
  UplinkChannels() = default;
  explicit UplinkChannels(int M);

  const DiagonalExtendedMatrix& at(int source, int relay) const;
  DiagonalExtendedMatrix& at(int source, int relay);
  int extension_length() const noexcept { return M_; }
  bool symmetric() const;

 private:
  int M_ = 0;
  std::array<std::array<DiagonalExtendedMatrix, kNumRelays>, kNumSources> h_;
};

/// Extended downlink channels of one block, indexed (relay, destination), 1-based.
class DownlinkChannels {
 public:
  DownlinkChannels() = default;
  explicit DownlinkChannels(int M);

  const DiagonalExtendedMatrix& at(int relay, int destination) const;
  DiagonalExtendedMatrix& at(int relay, int destination);
  int extension_length() const noexcept { return M_; }
  bool symmetric() const;

 private:
  int M_ = 0;
  std::array<std::array<DiagonalExtendedMatrix, kNumSources>, kNumRelays> h_;
};

UplinkChannels extend_uplink(const ChannelRealization& r, int block_index, int M);
DownlinkChannels extend_downlink(const ChannelRealization& r, int block_index, int M);

using SourceSignals = std::array<ComplexVector, kNumSources>;
using RelaySignals = std::array<ComplexVector, kNumRelays>;
using DestinationSignals = std::array<ComplexVector, kNumSources>;

/// y_Rk = sum_i H_{i,Rk} x_i + z_Rk. Noise for relay k is drawn from the
/// stream keyed by (noise_key, k); noise_power == 0 draws nothing.
RelaySignals first_hop_receive(const SourceSignals& x, const UplinkChannels& H,
                               double noise_power, std::uint64_t noise_key = 0);

/// y_i = sum_k H_{Rk,i} x_Rk + z_i.
DestinationSignals second_hop_receive(const RelaySignals& x_relay, const DownlinkChannels& H,
                                      double noise_power, std::uint64_t noise_key = 0);

}  // namespace relaylab::channel
