// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaylab/channel_model.hpp"

#include <cmath>

#include "relaylab/errors.hpp"
#include "relaylab/rng.hpp"

namespace relaylab::channel {

namespace {

constexpr int kNumLinks = 2 * kNumSources * kNumRelays;

void check_node(int node, const char* what) {
  if (node < 1 || node > kNumSources)
    throw PreconditionError(std::string(what) + " index out of range: " + std::to_string(node));
}

void check_relay(int relay) {
  if (relay < 1 || relay > kNumRelays)
    throw PreconditionError("relay index out of range: " + std::to_string(relay));
}

Link link_from_id(int id) {
  const int hop = id / (kNumSources * kNumRelays);
  const int rest = id % (kNumSources * kNumRelays);
  const int node = rest / kNumRelays + 1;
  const int relay = rest % kNumRelays + 1;
  return hop == 0 ? Link::up(node, relay) : Link::down(relay, node);
}

}  // namespace

Link Link::up(int source, int relay) {
  check_node(source, "source");
  check_relay(relay);
  return Link{Hop::uplink, source, relay};
}

Link Link::down(int relay, int destination) {
  check_node(destination, "destination");
  check_relay(relay);
  return Link{Hop::downlink, destination, relay};
}

int Link::id() const noexcept {
  const int base = hop == Hop::uplink ? 0 : kNumSources * kNumRelays;
  return base + (node - 1) * kNumRelays + (relay - 1);
}

Link Link::symmetric_representative() const noexcept {
  Link rep = *this;
  if (rep.node > 2) rep.node -= 2;
  return rep;
}

std::string Link::name() const {
  const std::string n = std::to_string(node);
  const std::string r = "R" + std::to_string(relay);
  return hop == Hop::uplink ? "H_{" + n + "," + r + "}" : "H_{" + r + "," + n + "}";
}

NetworkTopology::NetworkTopology(int relay1_antennas, int relay2_antennas)
    : antennas_(relay1_antennas, relay2_antennas),
      colocation_{{1, 3}, {3, 1}, {2, 4}, {4, 2}} {
  if (relay1_antennas < 1 || relay2_antennas < 1)
    throw PreconditionError("relay antenna counts must be positive");
}

int NetworkTopology::colocated_source(int destination) const {
  check_node(destination, "destination");
  return colocation_.at(destination);
}

ChannelRealization::ChannelRealization(int num_slots, bool symmetric, std::uint64_t seed)
    : num_slots_(num_slots),
      symmetric_(symmetric),
      seed_(seed),
      gains_(static_cast<std::size_t>(kNumLinks) * static_cast<std::size_t>(num_slots)) {
  if (num_slots < 1) throw PreconditionError("num_slots must be >= 1");
}

ChannelRealization ChannelRealization::from_function(int num_slots, bool symmetric,
                                                     const GainFunction& gain,
                                                     std::uint64_t seed) {
  ChannelRealization r(num_slots, symmetric, seed);
  for (int id = 0; id < kNumLinks; ++id) {
    const Link link = link_from_id(id);
    const Link source = symmetric ? link.symmetric_representative() : link;
    for (int m = 0; m < num_slots; ++m) {
      const auto idx = static_cast<std::size_t>(id) * num_slots + m;
      if (symmetric && source.id() != id)
        r.gains_[idx] = r.gains_[static_cast<std::size_t>(source.id()) * num_slots + m];
      else
        r.gains_[idx] = gain(link, m);
    }
  }
  return r;
}

ChannelRealization ChannelRealization::constant(int num_slots, ComplexGain g) {
  return from_function(num_slots, true, [g](const Link&, int) { return g; });
}

ComplexGain ChannelRealization::gain(const Link& link, int slot) const {
  if (slot < 0 || slot >= num_slots_)
    throw PreconditionError("slot out of range: " + std::to_string(slot));
  return gains_[static_cast<std::size_t>(link.id()) * num_slots_ + slot];
}

bool ChannelRealization::satisfies_symmetry() const {
  for (int id = 0; id < kNumLinks; ++id) {
    const Link link = link_from_id(id);
    const Link rep = link.symmetric_representative();
    for (int m = 0; m < num_slots_; ++m)
      if (gain(link, m) != gain(rep, m)) return false;
  }
  return true;
}

ChannelRealization sample_realization(std::uint64_t seed, bool symmetric, int num_slots,
                                      const ChannelConfig& config) {
  if (!(config.h_min >= 0.0) || !(config.h_max > config.h_min))
    throw PreconditionError("channel bounds must satisfy 0 <= h_min < h_max");
  const double lower = std::max(config.h_min, config.degenerate_floor);

  auto draw = [&](const Link& link, int slot) {
    ComplexGaussian gaussian(stream_key({seed, static_cast<std::uint64_t>(slot),
                                         static_cast<std::uint64_t>(link.id())}));
    for (std::uint64_t attempt = 0; attempt < config.max_retries; ++attempt) {
      const ComplexGain g = gaussian();
      const double mag = std::abs(g);
      if (mag >= lower && mag <= config.h_max) return g;
    }
    throw SamplingExhaustedError("no gain inside [" + std::to_string(config.h_min) + ", " +
                                 std::to_string(config.h_max) + "] after " +
                                 std::to_string(config.max_retries) + " draws for " +
                                 link.name());
  };
  return ChannelRealization::from_function(num_slots, symmetric, draw, seed);
}

DiagonalExtendedMatrix::DiagonalExtendedMatrix(ComplexVector diagonal)
    : diagonal_(std::move(diagonal)) {}

DiagonalExtendedMatrix DiagonalExtendedMatrix::identity(int M) {
  return DiagonalExtendedMatrix(ComplexVector::Ones(M));
}

ComplexVector DiagonalExtendedMatrix::apply(const ComplexVector& x) const {
  if (x.size() != diagonal_.size())
    throw DimensionError("diagonal channel of size " + std::to_string(diagonal_.size()) +
                         " applied to vector of size " + std::to_string(x.size()));
  return diagonal_.cwiseProduct(x);
}

Eigen::MatrixXcd DiagonalExtendedMatrix::dense() const {
  return diagonal_.asDiagonal();
}

double DiagonalExtendedMatrix::min_magnitude() const {
  if (diagonal_.size() == 0) return 0.0;
  return diagonal_.cwiseAbs().minCoeff();
}

DiagonalExtendedMatrix DiagonalExtendedMatrix::inverse(double floor) const {
  if (!invertible(floor))
    throw SingularChannelError("diagonal entry magnitude " + std::to_string(min_magnitude()) +
                               " is below the floor " + std::to_string(floor));
  return DiagonalExtendedMatrix(diagonal_.cwiseInverse());
}

DiagonalExtendedMatrix operator*(const DiagonalExtendedMatrix& a,
                                 const DiagonalExtendedMatrix& b) {
  if (a.extension_length() != b.extension_length())
    throw DimensionError("diagonal product of mismatched extension lengths");
  return DiagonalExtendedMatrix(a.diagonal_.cwiseProduct(b.diagonal_));
}

DiagonalExtendedMatrix extend_channel(const ChannelRealization& r, const Link& link,
                                      int block_index, int M) {
  if (M < 1) throw PreconditionError("extension length must be >= 1");
  if (block_index < 0 || static_cast<long>(block_index + 1) * M > r.num_slots())
    throw PreconditionError("block " + std::to_string(block_index) + " with M=" +
                            std::to_string(M) + " exceeds the " +
                            std::to_string(r.num_slots()) + " sampled slots");
  ComplexVector d(M);
  for (int k = 0; k < M; ++k) d(k) = r.gain(link, block_index * M + k);
  return DiagonalExtendedMatrix(std::move(d));
}

UplinkChannels::UplinkChannels(int M) : M_(M) {
  for (auto& row : h_)
    for (auto& h : row) h = DiagonalExtendedMatrix::identity(M);
}

const DiagonalExtendedMatrix& UplinkChannels::at(int source, int relay) const {
  check_node(source, "source");
  check_relay(relay);
  return h_[source - 1][relay - 1];
}

DiagonalExtendedMatrix& UplinkChannels::at(int source, int relay) {
  check_node(source, "source");
  check_relay(relay);
  return h_[source - 1][relay - 1];
}

bool UplinkChannels::symmetric() const {
  for (int k = 1; k <= kNumRelays; ++k)
    if (!(at(1, k) == at(3, k)) || !(at(2, k) == at(4, k))) return false;
  return true;
}

DownlinkChannels::DownlinkChannels(int M) : M_(M) {
  for (auto& row : h_)
    for (auto& h : row) h = DiagonalExtendedMatrix::identity(M);
}

const DiagonalExtendedMatrix& DownlinkChannels::at(int relay, int destination) const {
  check_relay(relay);
  check_node(destination, "destination");
  return h_[relay - 1][destination - 1];
}

DiagonalExtendedMatrix& DownlinkChannels::at(int relay, int destination) {
  check_relay(relay);
  check_node(destination, "destination");
  return h_[relay - 1][destination - 1];
}

bool DownlinkChannels::symmetric() const {
  for (int k = 1; k <= kNumRelays; ++k)
    if (!(at(k, 1) == at(k, 3)) || !(at(k, 2) == at(k, 4))) return false;
  return true;
}

UplinkChannels extend_uplink(const ChannelRealization& r, int block_index, int M) {
  UplinkChannels up(M);
  for (int i = 1; i <= kNumSources; ++i)
    for (int k = 1; k <= kNumRelays; ++k)
      up.at(i, k) = extend_channel(r, Link::up(i, k), block_index, M);
  return up;
}

DownlinkChannels extend_downlink(const ChannelRealization& r, int block_index, int M) {
  DownlinkChannels down(M);
  for (int k = 1; k <= kNumRelays; ++k)
    for (int i = 1; i <= kNumSources; ++i)
      down.at(k, i) = extend_channel(r, Link::down(k, i), block_index, M);
  return down;
}

namespace {

ComplexVector noise_vector(int M, double noise_power, std::uint64_t key) {
  ComplexVector z = ComplexVector::Zero(M);
  if (noise_power == 0.0) return z;
  ComplexGaussian gaussian(key, noise_power);
  for (int m = 0; m < M; ++m) z(m) = gaussian();
  return z;
}

}  // namespace

RelaySignals first_hop_receive(const SourceSignals& x, const UplinkChannels& H,
                               double noise_power, std::uint64_t noise_key) {
  if (noise_power < 0.0) throw PreconditionError("noise power must be nonnegative");
  const int M = H.extension_length();
  RelaySignals y;
  for (int k = 1; k <= kNumRelays; ++k) {
    ComplexVector acc = noise_vector(M, noise_power, stream_key({noise_key, 0x51ULL, static_cast<std::uint64_t>(k)}));
    for (int i = 1; i <= kNumSources; ++i) {
      if (x[i - 1].size() != M)
        throw DimensionError("source " + std::to_string(i) + " signal has length " +
                             std::to_string(x[i - 1].size()) + ", expected " + std::to_string(M));
      acc += H.at(i, k).apply(x[i - 1]);
    }
    y[k - 1] = std::move(acc);
  }
  return y;
}

DestinationSignals second_hop_receive(const RelaySignals& x_relay, const DownlinkChannels& H,
                                      double noise_power, std::uint64_t noise_key) {
  if (noise_power < 0.0) throw PreconditionError("noise power must be nonnegative");
  const int M = H.extension_length();
  for (int k = 1; k <= kNumRelays; ++k)
    if (x_relay[k - 1].size() != M)
      throw DimensionError("relay " + std::to_string(k) + " signal has length " +
                           std::to_string(x_relay[k - 1].size()) + ", expected " +
                           std::to_string(M));
  DestinationSignals y;
  for (int i = 1; i <= kNumSources; ++i) {
    ComplexVector acc = noise_vector(M, noise_power, stream_key({noise_key, 0xD5ULL, static_cast<std::uint64_t>(i)}));
    for (int k = 1; k <= kNumRelays; ++k) acc += H.at(k, i).apply(x_relay[k - 1]);
    y[i - 1] = std::move(acc);
  }
  return y;
}

}  // namespace relaylab::channel
