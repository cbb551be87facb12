// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

// M-symbol-extension interference alignment for the symmetric two-way
// 2x2x2 relay network.
//
// Sources 1 and 3 send M streams through beamformers v1[0..M-1]; sources 2
// and 4 send M-1 streams through v2[0..M-2]. The source beamformers align
// the 2/4 streams with 1/3 streams at both relays, so each relay zero-forces
// M aligned stream sums. Relay R_1 forwards all M sums through vR1, relay
// R_2 forwards its first M-1 sums through vR2, chosen so that at every
// destination the opposite group's contribution cancels. Destinations then
// decode successively and strip their colocated source's symbols.
//
// Vectors are 0-based; the comments use the 1-based stream numbering
// (v_{1,1} == v1[0]).

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relaylab/channel_model.hpp"

namespace relaylab::ia {

using channel::ComplexGain;
using channel::ComplexVector;
using channel::DownlinkChannels;
using channel::UplinkChannels;

struct Tolerances {
  double align = 1e-9;      ///< relative residual budget for the four invariant families
  double cond_max = 1e8;    ///< largest condition number accepted for any inversion
  double floor = 1e-6;      ///< diagonal entries at or below this count as singular

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct BeamformerSet {
  int M = 0;
  std::vector<ComplexVector> v1;   ///< M vectors, sources 1 and 3
  std::vector<ComplexVector> v2;   ///< M-1 vectors, sources 2 and 4
  std::vector<ComplexVector> vR1;  ///< M vectors, relay 1
  std::vector<ComplexVector> vR2;  ///< M-1 vectors, relay 2

  bool has_relay_beamformers() const noexcept { return static_cast<int>(vR1.size()) == M; }
  /// 4M - 2 streams per block.
  int stream_count() const noexcept { return 4 * M - 2; }
};

/// How v_{1,1} and v_{R_1,1} are chosen.
enum class InitPolicy {
  ones,          ///< all-ones vector
  random,        ///< random phase, magnitude uniform in [0.5, 2]
  equilibrated,  ///< entry m = min(1, |t_m|^-(M-1)), t the recursion diagonal
};

std::string to_string(InitPolicy policy);
InitPolicy parse_init_policy(const std::string& name);

/// Diagonal of H_{1,R1}^-1 H_{2,R1} H_{2,R2}^-1 H_{1,R2}.
ComplexVector source_recursion_diagonal(const UplinkChannels& up, const Tolerances& tol = {});
/// Diagonal of H_{R1,1}^-1 H_{R2,1} H_{R2,2}^-1 H_{R1,2}.
ComplexVector relay_recursion_diagonal(const DownlinkChannels& down, const Tolerances& tol = {});

ComplexVector initial_beamformer(const ComplexVector& recursion_diagonal, InitPolicy policy,
                                 std::uint64_t key = 0);

/// Fills v1 and v2 from v_{1,1}. Requires symmetric uplink channels with
/// invertible diagonals and an entrywise-nonzero v11.
BeamformerSet build_source_beamformers(const UplinkChannels& up, const ComplexVector& v11,
                                       const Tolerances& tol = {});

/// Completes `partial` with vR1 and vR2 derived from v_{R_1,1}.
BeamformerSet build_relay_beamformers(BeamformerSet partial, const DownlinkChannels& down,
                                      const ComplexVector& vR1_1, const Tolerances& tol = {});

enum class Condition { align_r1 = 0, align_r2 = 1, cancel_d13 = 2, cancel_d24 = 3 };
inline constexpr int kNumConditions = 4;
std::string to_string(Condition c);

struct ResidualViolation {
  Condition condition;
  int index;  ///< 1-based i of the violated equation
  double residual;
};

struct ResidualReport {
  double tolerance = 1e-9;
  std::array<double, kNumConditions> max_residual{};
  std::array<int, kNumConditions> worst_index{};  ///< 1-based, 0 when the family is empty
  std::array<bool, kNumConditions> checked{};
  std::vector<ResidualViolation> violations;

  bool passed() const noexcept { return violations.empty(); }
  void merge(const ResidualReport& other);
};

/// Relative residuals of H_{1,R1} v_{1,i+1} = H_{2,R1} v_{2,i} and
/// H_{1,R2} v_{1,i} = H_{2,R2} v_{2,i}.
ResidualReport verify_alignment(const UplinkChannels& up, const BeamformerSet& B,
                                double tol = 1e-9);
/// Relative residuals of H_{R1,1} v_{R1,i+1} = -H_{R2,1} v_{R2,i} and
/// -H_{R1,2} v_{R1,i} = H_{R2,2} v_{R2,i}.
ResidualReport verify_cancellation(const DownlinkChannels& down, const BeamformerSet& B,
                                   double tol = 1e-9);

/// Per-stream symbols x_{i,k} of one block, already carrying their power.
struct SymbolBlock {
  int M = 0;
  std::array<std::vector<ComplexGain>, 4> x;  ///< x[i-1][k-1]
  std::array<double, 4> power{};              ///< declared per-stream variance of source i

  static int streams_of(int source, int M) noexcept { return source % 2 == 1 ? M : M - 1; }
  static SymbolBlock zeros(int M);
  /// CN(0, power) symbols; sources 1/3 use power13, sources 2/4 power24.
  static SymbolBlock random(int M, double power13, double power24, std::uint64_t key);
};

/// Per-stream symbol variances that bring each source to average per-slot
/// power P: p_g = P M / sum_k ||v_{g,k}||^2.
struct StreamPowers {
  double group13 = 0.0;
  double group24 = 0.0;
};
StreamPowers source_stream_powers(const BeamformerSet& B, double P);

/// x_i = sum_k v_{g(i),k} x_{i,k}.
channel::SourceSignals source_transmit(const SymbolBlock& s, const BeamformerSet& B);

/// H_Rk = [H_{1,Rk} v_{1,1} ... H_{1,Rk} v_{1,M}].
Eigen::MatrixXcd effective_relay_matrix(const UplinkChannels& up, const BeamformerSet& B,
                                        int relay);

/// M x (2M-1) map from group sums [a_1..a_M, b_1..b_{M-1}] (a_k = x_{1,k}+x_{3,k},
/// b_k = x_{2,k}+x_{4,k}) to the noiseless zero-forced stream vector of relay k.
Eigen::MatrixXd relay_mixing_matrix(int M, int relay);

double condition_number(const Eigen::MatrixXcd& A);

/// H_eff^-1 y; throws ConditioningError above cond_max.
ComplexVector relay_zero_force(const ComplexVector& y, const Eigen::MatrixXcd& H_eff,
                               double cond_max = 1e8);

/// Streams actually forwarded: all M at R_1, the first M-1 at R_2.
channel::RelaySignals forwarded_streams(const ComplexVector& zf_r1, const ComplexVector& zf_r2);

/// x_R1 = g sum_k v_{R1,k} x_{R1,k}, x_R2 = g sum_k v_{R2,k} x_{R2,k} with
/// the given common amplification g.
channel::RelaySignals relay_transmit_with_gain(const channel::RelaySignals& streams,
                                               const BeamformerSet& B, double gain);

/// Same, with g chosen from the realized block energy so that both relays'
/// per-slot power is <= relay_power. One common g keeps the destination
/// cancellation intact.
channel::RelaySignals relay_transmit(const channel::RelaySignals& streams,
                                     const BeamformerSet& B, double relay_power);

/// Everything a destination needs to equalize and to account for noise.
struct LinkBudget {
  StreamPowers stream_power;
  double relay_gain = 1.0;
  double relay_noise_power = 1.0;
  double destination_noise_power = 1.0;
  std::array<Eigen::MatrixXcd, 2> relay_inverse;  ///< H_Rk^-1 at each relay
};

/// Common relay amplification from the expected stream covariances, so each
/// relay's expected per-slot power is <= relay_power.
double relay_gain(const BeamformerSet& B, const StreamPowers& powers,
                  const std::array<Eigen::MatrixXcd, 2>& relay_inverse, double relay_noise_power,
                  double relay_power);

/// Assembles a LinkBudget for one block (inverts both effective relay matrices).
LinkBudget make_link_budget(const UplinkChannels& up, const BeamformerSet& B, double P,
                            double relay_power, double relay_noise_power,
                            double destination_noise_power, const Tolerances& tol = {});

/// H_1 (destinations 1, 3) or H_2 (destinations 2, 4) of the successive decoder.
Eigen::MatrixXcd destination_matrix(const BeamformerSet& B, const DownlinkChannels& down,
                                    int destination);

struct DecodedBlock {
  int destination = 0;
  std::vector<ComplexGain> estimates;  ///< x_{dest,k}, k = 1..streams
  std::vector<double> sinr;            ///< linear, genie-aided, >= 0
  std::vector<int> decode_order;       ///< 1-based stream indices
};

/// Genie-aided per-stream SINR from exact propagation of relay and local
/// noise. Zero-power streams report 0; noiseless streams report +inf.
std::vector<double> stream_sinr(const BeamformerSet& B, const DownlinkChannels& down,
                                int destination, const LinkBudget& budget,
                                double cond_max = 1e8);

/// Equalizes with H_1/H_2, decodes successively, and cancels the colocated
/// source's symbols given in `side_info`.
DecodedBlock destination_decode(const ComplexVector& y, const BeamformerSet& B,
                                const DownlinkChannels& down,
                                std::span<const ComplexGain> side_info, int destination,
                                const LinkBudget& budget, double cond_max = 1e8);

}  // namespace relaylab::ia
