// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaylab/ia_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "relaylab/errors.hpp"
#include "relaylab/rng.hpp"

namespace relaylab::ia {

namespace {

using channel::DiagonalExtendedMatrix;

void require_invertible(const DiagonalExtendedMatrix& h, const char* name, double floor) {
  if (!h.invertible(floor))
    throw SingularChannelError(std::string(name) + " has a diagonal entry of magnitude " +
                               std::to_string(h.min_magnitude()) + " (floor " +
                               std::to_string(floor) + ")");
}

void require_nonzero_entries(const ComplexVector& v, const char* name) {
  for (Eigen::Index m = 0; m < v.size(); ++m)
    if (v(m) == ComplexGain(0.0, 0.0))
      throw PreconditionError(std::string(name) + " has a zero entry at index " +
                              std::to_string(m));
}

double relative_residual(const ComplexVector& lhs, const ComplexVector& rhs) {
  const double scale = lhs.norm();
  const double diff = (lhs - rhs).norm();
  if (scale == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / scale;
}

void record(ResidualReport& report, Condition c, int index, double residual) {
  const auto slot = static_cast<std::size_t>(c);
  report.checked[slot] = true;
  if (report.worst_index[slot] == 0 || residual > report.max_residual[slot]) {
    report.max_residual[slot] = residual;
    report.worst_index[slot] = index;
  }
  if (!(residual <= report.tolerance)) report.violations.push_back({c, index, residual});
}

Eigen::MatrixXcd stack_columns(const std::vector<ComplexVector>& vs, int rows) {
  Eigen::MatrixXcd V(rows, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) V.col(static_cast<Eigen::Index>(j)) = vs[j];
  return V;
}

bool is_group13(int destination) { return destination == 1 || destination == 3; }

}  // namespace

std::string to_string(InitPolicy policy) {
  switch (policy) {
    case InitPolicy::ones: return "ones";
    case InitPolicy::random: return "random";
    case InitPolicy::equilibrated: return "equilibrated";
  }
  return "unknown";
}

InitPolicy parse_init_policy(const std::string& name) {
  if (name == "ones") return InitPolicy::ones;
  if (name == "random") return InitPolicy::random;
  if (name == "equilibrated") return InitPolicy::equilibrated;
  throw PreconditionError("unknown beamformer init policy '" + name + "'");
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::align_r1: return "align_R1";
    case Condition::align_r2: return "align_R2";
    case Condition::cancel_d13: return "cancel_D1D3";
    case Condition::cancel_d24: return "cancel_D2D4";
  }
  return "unknown";
}

ComplexVector source_recursion_diagonal(const UplinkChannels& up, const Tolerances& tol) {
  const auto& h1r1 = up.at(1, 1);
  const auto& h2r1 = up.at(2, 1);
  const auto& h1r2 = up.at(1, 2);
  const auto& h2r2 = up.at(2, 2);
  require_invertible(h1r1, "H_{1,R1}", tol.floor);
  require_invertible(h2r2, "H_{2,R2}", tol.floor);
  return (h1r1.inverse(tol.floor) * h2r1 * h2r2.inverse(tol.floor) * h1r2).diagonal();
}

ComplexVector relay_recursion_diagonal(const DownlinkChannels& down, const Tolerances& tol) {
  const auto& hr11 = down.at(1, 1);
  const auto& hr21 = down.at(2, 1);
  const auto& hr12 = down.at(1, 2);
  const auto& hr22 = down.at(2, 2);
  require_invertible(hr11, "H_{R1,1}", tol.floor);
  require_invertible(hr22, "H_{R2,2}", tol.floor);
  return (hr11.inverse(tol.floor) * hr21 * hr22.inverse(tol.floor) * hr12).diagonal();
}

ComplexVector initial_beamformer(const ComplexVector& recursion_diagonal, InitPolicy policy,
                                 std::uint64_t key) {
  const Eigen::Index M = recursion_diagonal.size();
  ComplexVector v(M);
  switch (policy) {
    case InitPolicy::ones:
      v.setOnes();
      break;
    case InitPolicy::random: {
      SplitMix64 gen(stream_key({key, 0xB5ULL}));
      std::uniform_real_distribution<double> magnitude(0.5, 2.0);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      for (Eigen::Index m = 0; m < M; ++m) v(m) = std::polar(magnitude(gen), phase(gen));
      break;
    }
    case InitPolicy::equilibrated:
      // Largest |entry| of each row of [v, t v, ..., t^(M-1) v] becomes 1.
      for (Eigen::Index m = 0; m < M; ++m) {
        const double t = std::abs(recursion_diagonal(m));
        v(m) = t > 1.0 ? std::pow(t, -static_cast<double>(M - 1)) : 1.0;
      }
      break;
  }
  return v;
}

BeamformerSet build_source_beamformers(const UplinkChannels& up, const ComplexVector& v11,
                                       const Tolerances& tol) {
  const int M = up.extension_length();
  if (M < 1) throw PreconditionError("extension length must be >= 1");
  if (v11.size() != M) throw DimensionError("v_{1,1} length does not match M");
  if (!up.symmetric()) throw PreconditionError("source beamformers need symmetric uplink channels");
  for (int i = 1; i <= 2; ++i)
    for (int k = 1; k <= 2; ++k)
      require_invertible(up.at(i, k), "uplink channel", tol.floor);
  require_nonzero_entries(v11, "v_{1,1}");

  const auto& h1r1 = up.at(1, 1);
  const auto& h2r1 = up.at(2, 1);
  const auto& h1r2 = up.at(1, 2);
  const auto& h2r2 = up.at(2, 2);
  const ComplexVector t1 =
      (h1r1.inverse(tol.floor) * h2r1 * h2r2.inverse(tol.floor) * h1r2).diagonal();
  const ComplexVector t2 =
      (h2r2.inverse(tol.floor) * h1r2 * h1r1.inverse(tol.floor) * h2r1).diagonal();
  const ComplexVector c = (h2r2.inverse(tol.floor) * h1r2).diagonal();

  BeamformerSet B;
  B.M = M;
  B.v1.reserve(M);
  B.v1.push_back(v11);
  for (int i = 1; i < M; ++i) B.v1.push_back(t1.cwiseProduct(B.v1.back()));
  if (M > 1) {
    B.v2.reserve(M - 1);
    B.v2.push_back(c.cwiseProduct(v11));
    for (int i = 2; i < M; ++i) B.v2.push_back(t2.cwiseProduct(B.v2.back()));
  }
  return B;
}

BeamformerSet build_relay_beamformers(BeamformerSet partial, const DownlinkChannels& down,
                                      const ComplexVector& vR1_1, const Tolerances& tol) {
  const int M = partial.M;
  if (down.extension_length() != M) throw DimensionError("downlink extension length differs from M");
  if (vR1_1.size() != M) throw DimensionError("v_{R1,1} length does not match M");
  if (!down.symmetric())
    throw PreconditionError("relay beamformers need symmetric downlink channels");
  for (int k = 1; k <= 2; ++k)
    for (int i = 1; i <= 2; ++i) require_invertible(down.at(k, i), "downlink channel", tol.floor);
  require_nonzero_entries(vR1_1, "v_{R1,1}");

  const auto& hr11 = down.at(1, 1);
  const auto& hr21 = down.at(2, 1);
  const auto& hr12 = down.at(1, 2);
  const auto& hr22 = down.at(2, 2);
  const ComplexVector t1 =
      (hr11.inverse(tol.floor) * hr21 * hr22.inverse(tol.floor) * hr12).diagonal();
  const ComplexVector t2 =
      (hr22.inverse(tol.floor) * hr12 * hr11.inverse(tol.floor) * hr21).diagonal();
  const ComplexVector c = (hr22.inverse(tol.floor) * hr12).diagonal();

  partial.vR1.clear();
  partial.vR2.clear();
  partial.vR1.push_back(vR1_1);
  for (int i = 1; i < M; ++i) partial.vR1.push_back(t1.cwiseProduct(partial.vR1.back()));
  if (M > 1) {
    partial.vR2.push_back(-c.cwiseProduct(vR1_1));
    for (int i = 2; i < M; ++i) partial.vR2.push_back(t2.cwiseProduct(partial.vR2.back()));
  }
  return partial;
}

void ResidualReport::merge(const ResidualReport& other) {
  for (int c = 0; c < kNumConditions; ++c) {
    if (!other.checked[c]) continue;
    if (!checked[c] || other.max_residual[c] > max_residual[c]) {
      max_residual[c] = other.max_residual[c];
      worst_index[c] = other.worst_index[c];
    }
    checked[c] = true;
  }
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

ResidualReport verify_alignment(const UplinkChannels& up, const BeamformerSet& B, double tol) {
  ResidualReport report;
  report.tolerance = tol;
  const int M = B.M;
  if (static_cast<int>(B.v1.size()) != M || static_cast<int>(B.v2.size()) != std::max(M - 1, 0))
    throw DimensionError("beamformer set has inconsistent source vector counts");
  report.checked[static_cast<int>(Condition::align_r1)] = true;
  report.checked[static_cast<int>(Condition::align_r2)] = true;
  for (int i = 1; i <= M - 1; ++i) {
    record(report, Condition::align_r1, i,
           relative_residual(up.at(1, 1).apply(B.v1[i]), up.at(2, 1).apply(B.v2[i - 1])));
    record(report, Condition::align_r2, i,
           relative_residual(up.at(1, 2).apply(B.v1[i - 1]), up.at(2, 2).apply(B.v2[i - 1])));
  }
  return report;
}

ResidualReport verify_cancellation(const DownlinkChannels& down, const BeamformerSet& B,
                                   double tol) {
  ResidualReport report;
  report.tolerance = tol;
  const int M = B.M;
  if (static_cast<int>(B.vR1.size()) != M ||
      static_cast<int>(B.vR2.size()) != std::max(M - 1, 0))
    throw DimensionError("beamformer set has inconsistent relay vector counts");
  report.checked[static_cast<int>(Condition::cancel_d13)] = true;
  report.checked[static_cast<int>(Condition::cancel_d24)] = true;
  for (int i = 1; i <= M - 1; ++i) {
    record(report, Condition::cancel_d13, i,
           relative_residual(down.at(1, 1).apply(B.vR1[i]),
                             -down.at(2, 1).apply(B.vR2[i - 1])));
    record(report, Condition::cancel_d24, i,
           relative_residual(-down.at(1, 2).apply(B.vR1[i - 1]),
                             down.at(2, 2).apply(B.vR2[i - 1])));
  }
  return report;
}

SymbolBlock SymbolBlock::zeros(int M) {
  SymbolBlock s;
  s.M = M;
  for (int i = 1; i <= 4; ++i)
    s.x[i - 1].assign(static_cast<std::size_t>(std::max(streams_of(i, M), 0)), ComplexGain{});
  return s;
}

SymbolBlock SymbolBlock::random(int M, double power13, double power24, std::uint64_t key) {
  SymbolBlock s = zeros(M);
  for (int i = 1; i <= 4; ++i) {
    const double p = i % 2 == 1 ? power13 : power24;
    s.power[i - 1] = p;
    if (p == 0.0) continue;
    ComplexGaussian gaussian(stream_key({key, 0x5BULL, static_cast<std::uint64_t>(i)}), p);
    for (auto& sym : s.x[i - 1]) sym = gaussian();
  }
  return s;
}

StreamPowers source_stream_powers(const BeamformerSet& B, double P) {
  if (P < 0.0) throw PreconditionError("transmit power must be nonnegative");
  auto power_for = [&](const std::vector<ComplexVector>& vs) {
    double energy = 0.0;
    for (const auto& v : vs) energy += v.squaredNorm();
    return energy > 0.0 ? P * B.M / energy : 0.0;
  };
  return {power_for(B.v1), power_for(B.v2)};
}

channel::SourceSignals source_transmit(const SymbolBlock& s, const BeamformerSet& B) {
  if (s.M != B.M) throw DimensionError("symbol block and beamformers use different M");
  channel::SourceSignals x;
  for (int i = 1; i <= 4; ++i) {
    const auto& vs = i % 2 == 1 ? B.v1 : B.v2;
    const auto& sym = s.x[i - 1];
    if (sym.size() != vs.size())
      throw DimensionError("source " + std::to_string(i) + " carries " +
                           std::to_string(sym.size()) + " symbols but has " +
                           std::to_string(vs.size()) + " beamformers");
    ComplexVector xi = ComplexVector::Zero(B.M);
    for (std::size_t k = 0; k < vs.size(); ++k) xi += vs[k] * sym[k];
    x[i - 1] = std::move(xi);
  }
  return x;
}

Eigen::MatrixXcd effective_relay_matrix(const UplinkChannels& up, const BeamformerSet& B,
                                        int relay) {
  Eigen::MatrixXcd H(B.M, B.M);
  for (int j = 0; j < B.M; ++j) H.col(j) = up.at(1, relay).apply(B.v1[j]);
  return H;
}

Eigen::MatrixXd relay_mixing_matrix(int M, int relay) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, 2 * M - 1);
  for (int k = 0; k < M; ++k) A(k, k) = 1.0;
  if (relay == 1) {
    for (int k = 1; k < M; ++k) A(k, M + k - 1) = 1.0;
  } else if (relay == 2) {
    for (int k = 0; k < M - 1; ++k) A(k, M + k) = 1.0;
  } else {
    throw PreconditionError("relay index out of range");
  }
  return A;
}

double condition_number(const Eigen::MatrixXcd& A) {
  if (A.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

ComplexVector relay_zero_force(const ComplexVector& y, const Eigen::MatrixXcd& H_eff,
                               double cond_max) {
  if (H_eff.rows() != H_eff.cols() || H_eff.rows() != y.size())
    throw DimensionError("effective relay matrix does not match the received vector");
  const double cond = condition_number(H_eff);
  if (!(cond <= cond_max)) throw ConditioningError("effective relay matrix is ill-conditioned", cond);
  return H_eff.fullPivLu().solve(y);
}

channel::RelaySignals forwarded_streams(const ComplexVector& zf_r1, const ComplexVector& zf_r2) {
  if (zf_r1.size() != zf_r2.size() || zf_r1.size() < 1)
    throw DimensionError("zero-forced relay vectors must both have length M >= 1");
  return {zf_r1, zf_r2.head(zf_r2.size() - 1)};
}

namespace {

channel::RelaySignals unscaled_relay_output(const channel::RelaySignals& streams,
                                            const BeamformerSet& B) {
  if (!B.has_relay_beamformers()) throw PreconditionError("relay beamformers not built");
  if (streams[0].size() != static_cast<Eigen::Index>(B.vR1.size()) ||
      streams[1].size() != static_cast<Eigen::Index>(B.vR2.size()))
    throw DimensionError("relay streams must be M at R1 and M-1 at R2, got " +
                         std::to_string(streams[0].size()) + " and " +
                         std::to_string(streams[1].size()));
  channel::RelaySignals out{ComplexVector::Zero(B.M), ComplexVector::Zero(B.M)};
  for (std::size_t k = 0; k < B.vR1.size(); ++k)
    out[0] += B.vR1[k] * streams[0](static_cast<Eigen::Index>(k));
  for (std::size_t k = 0; k < B.vR2.size(); ++k)
    out[1] += B.vR2[k] * streams[1](static_cast<Eigen::Index>(k));
  return out;
}

double common_gain(const std::array<double, 2>& per_slot_power, double relay_power) {
  double gain = std::numeric_limits<double>::infinity();
  for (double e : per_slot_power)
    if (e > 0.0) gain = std::min(gain, std::sqrt(relay_power / e));
  return std::isfinite(gain) ? gain : 1.0;
}

}  // namespace

channel::RelaySignals relay_transmit_with_gain(const channel::RelaySignals& streams,
                                               const BeamformerSet& B, double gain) {
  if (!(gain > 0.0)) throw PreconditionError("relay gain must be positive");
  auto out = unscaled_relay_output(streams, B);
  out[0] *= gain;
  out[1] *= gain;
  return out;
}

channel::RelaySignals relay_transmit(const channel::RelaySignals& streams, const BeamformerSet& B,
                                     double relay_power) {
  if (!(relay_power > 0.0)) throw PreconditionError("relay power must be positive");
  auto out = unscaled_relay_output(streams, B);
  const double g = common_gain(
      {out[0].squaredNorm() / B.M, out[1].squaredNorm() / B.M}, relay_power);
  out[0] *= g;
  out[1] *= g;
  return out;
}

double relay_gain(const BeamformerSet& B, const StreamPowers& powers,
                  const std::array<Eigen::MatrixXcd, 2>& relay_inverse, double relay_noise_power,
                  double relay_power) {
  if (!B.has_relay_beamformers()) throw PreconditionError("relay beamformers not built");
  const int M = B.M;
  Eigen::VectorXd sum_power(2 * M - 1);
  sum_power.head(M).setConstant(2.0 * powers.group13);
  sum_power.tail(M - 1).setConstant(2.0 * powers.group24);

  std::array<double, 2> per_slot{};
  for (int k = 0; k < 2; ++k) {
    const Eigen::MatrixXd A = relay_mixing_matrix(M, k + 1);
    Eigen::MatrixXcd cov = (A * sum_power.asDiagonal() * A.transpose()).cast<ComplexGain>();
    cov += relay_noise_power * relay_inverse[k] * relay_inverse[k].adjoint();
    const auto& vs = k == 0 ? B.vR1 : B.vR2;
    const int n = static_cast<int>(vs.size());
    if (n == 0) continue;
    const Eigen::MatrixXcd V = stack_columns(vs, M);
    per_slot[k] = (V * cov.topLeftCorner(n, n) * V.adjoint()).trace().real() / M;
  }
  return common_gain(per_slot, relay_power);
}

LinkBudget make_link_budget(const UplinkChannels& up, const BeamformerSet& B, double P,
                            double relay_power, double relay_noise_power,
                            double destination_noise_power, const Tolerances& tol) {
  LinkBudget budget;
  budget.stream_power = source_stream_powers(B, P);
  budget.relay_noise_power = relay_noise_power;
  budget.destination_noise_power = destination_noise_power;
  for (int k = 0; k < 2; ++k) {
    const Eigen::MatrixXcd H = effective_relay_matrix(up, B, k + 1);
    const double cond = condition_number(H);
    if (!(cond <= tol.cond_max))
      throw ConditioningError("effective matrix at relay " + std::to_string(k + 1), cond);
    budget.relay_inverse[k] = H.fullPivLu().inverse();
  }
  budget.relay_gain =
      relay_gain(B, budget.stream_power, budget.relay_inverse, relay_noise_power, relay_power);
  return budget;
}

Eigen::MatrixXcd destination_matrix(const BeamformerSet& B, const DownlinkChannels& down,
                                    int destination) {
  if (!B.has_relay_beamformers()) throw PreconditionError("relay beamformers not built");
  const int M = B.M;
  Eigen::MatrixXcd H(M, M);
  if (is_group13(destination)) {
    for (int j = 0; j < M; ++j) H.col(j) = down.at(1, destination).apply(B.vR1[j]);
  } else {
    for (int j = 0; j < M - 1; ++j) H.col(j) = down.at(2, destination).apply(B.vR2[j]);
    H.col(M - 1) = down.at(1, destination).apply(B.vR1[M - 1]);
  }
  return H;
}

std::vector<double> stream_sinr(const BeamformerSet& B, const DownlinkChannels& down,
                                int destination, const LinkBudget& budget, double cond_max) {
  const int M = B.M;
  const int streams = SymbolBlock::streams_of(destination, M);
  const double p =
      is_group13(destination) ? budget.stream_power.group13 : budget.stream_power.group24;
  std::vector<double> sinr(static_cast<std::size_t>(std::max(streams, 0)), 0.0);
  if (streams <= 0) return sinr;
  if (p == 0.0) return sinr;

  const Eigen::MatrixXcd Hd = destination_matrix(B, down, destination);
  const double cond = condition_number(Hd);
  if (!(cond <= cond_max)) throw ConditioningError("destination matrix is ill-conditioned", cond);
  const Eigen::MatrixXcd Hd_inv = Hd.fullPivLu().inverse();

  // Relay noise reaches r = Hd^-1 y / g through the zero-forcing inverse,
  // the relay beamformers and the downlink; local noise is scaled by 1/g.
  const Eigen::MatrixXcd VR1 = stack_columns(B.vR1, M);
  const Eigen::MatrixXcd N1 =
      Hd_inv * down.at(1, destination).dense() * VR1 * budget.relay_inverse[0];
  Eigen::MatrixXcd Q = budget.relay_noise_power * (N1 * N1.adjoint());
  if (M > 1) {
    const Eigen::MatrixXcd VR2 = stack_columns(B.vR2, M);
    const Eigen::MatrixXcd N2 = Hd_inv * down.at(2, destination).dense() * VR2 *
                                budget.relay_inverse[1].topRows(M - 1);
    Q += budget.relay_noise_power * (N2 * N2.adjoint());
  }
  const double g2 = budget.relay_gain * budget.relay_gain;
  Q += (budget.destination_noise_power / g2) * (Hd_inv * Hd_inv.adjoint());

  for (int k = 0; k < streams; ++k) {
    const double noise = Q(k, k).real();
    sinr[k] = noise > 0.0 ? p / noise : std::numeric_limits<double>::infinity();
  }
  return sinr;
}

DecodedBlock destination_decode(const ComplexVector& y, const BeamformerSet& B,
                                const DownlinkChannels& down,
                                std::span<const ComplexGain> side_info, int destination,
                                const LinkBudget& budget, double cond_max) {
  const int M = B.M;
  if (y.size() != M) throw DimensionError("received vector length differs from M");
  const int streams = SymbolBlock::streams_of(destination, M);
  if (static_cast<int>(side_info.size()) != streams)
    throw PreconditionError("missing side information: destination " +
                            std::to_string(destination) + " needs " + std::to_string(streams) +
                            " colocated symbols, got " + std::to_string(side_info.size()));

  const Eigen::MatrixXcd Hd = destination_matrix(B, down, destination);
  const double cond = condition_number(Hd);
  if (!(cond <= cond_max)) throw ConditioningError("destination matrix is ill-conditioned", cond);
  const ComplexVector r = Hd.fullPivLu().solve(y) / budget.relay_gain;

  DecodedBlock out;
  out.destination = destination;
  out.estimates.resize(static_cast<std::size_t>(streams));
  out.decode_order.resize(static_cast<std::size_t>(streams));
  // Entry k carries s_k - s_{k-1} for the pair sum s_k; accumulate top-down.
  ComplexGain pair_sum{};
  for (int k = 0; k < streams; ++k) {
    pair_sum += r(k);
    out.estimates[k] = pair_sum - side_info[k];
    out.decode_order[k] = k + 1;
  }
  out.sinr = stream_sinr(B, down, destination, budget, cond_max);
  return out;
}

}  // namespace relaylab::ia
