// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

// XOR relay caching: the relays store W'_1 = W_1 ^ W_3 and W'_2 = W_2 ^ W_4
// offline, act as one (N1 + N2)-antenna super relay online, and every
// destination strips its colocated source's message from the word it is
// served.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "relaylab/channel_model.hpp"
#include "relaylab/rational.hpp"

namespace relaylab::caching {

/// Fixed-length bit string. owner is the source index (1..4), or 0 for a
/// coded word.
class MessageWord {
 public:
  MessageWord() = default;
  MessageWord(std::size_t bits, int owner);

  /// Parses a string of '0'/'1', most significant (index 0) first.
  static MessageWord from_string(const std::string& bits, int owner = 0);
  static MessageWord random(std::size_t bits, int owner, std::uint64_t key);

  std::size_t size() const noexcept { return bits_; }
  int owner() const noexcept { return owner_; }
  bool bit(std::size_t i) const;
  void set(std::size_t i, bool value);
  std::size_t popcount() const;
  std::string to_string() const;
  MessageWord with_owner(int owner) const;

  /// Bitwise XOR; throws DimensionError on length mismatch. Result is coded (owner 0).
  friend MessageWord operator^(const MessageWord& a, const MessageWord& b);
  /// Equality of the bit contents (owner ignored).
  friend bool operator==(const MessageWord& a, const MessageWord& b) {
    return a.bits_ == b.bits_ && a.words_ == b.words_;
  }

 private:
  std::size_t bits_ = 0;
  int owner_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Contents of one relay cache. Default-constructed caches are empty (no
/// placement has happened).
class RelayCache {
 public:
  RelayCache() = default;
  RelayCache(MessageWord w1p, MessageWord w2p);

  bool populated() const noexcept { return populated_; }
  const MessageWord& w1p() const noexcept { return w1p_; }
  const MessageWord& w2p() const noexcept { return w2p_; }
  /// Coded word j in {1, 2}.
  const MessageWord& word(int j) const;
  /// Stored size: 2L bits.
  std::size_t size_bits() const noexcept { return w1p_.size() + w2p_.size(); }

  friend bool operator==(const RelayCache& a, const RelayCache& b) {
    return a.populated_ == b.populated_ && a.w1p_ == b.w1p_ && a.w2p_ == b.w2p_;
  }

 private:
  bool populated_ = false;
  MessageWord w1p_;
  MessageWord w2p_;
};

/// Both relays receive an identical copy of the returned cache.
RelayCache placement_phase(const MessageWord& w1, const MessageWord& w2, const MessageWord& w3,
                           const MessageWord& w4);

/// Coded word index -> destinations it must be decodable at.
using TargetMap = std::map<int, std::vector<int>>;
/// {W'_1 -> {D_1, D_3}, W'_2 -> {D_2, D_4}}.
TargetMap default_target_map();

struct SuperRelay {
  int antennas = 0;
  RelayCache cache;
  TargetMap targets;
};

/// Both relays viewed as one (N1 + N2)-antenna transmitter. Throws
/// PreconditionError when the caches differ or are empty.
SuperRelay super_relay(const channel::NetworkTopology& topology, const RelayCache& relay1,
                       const RelayCache& relay2);

/// delivered ^ own.
MessageWord receiver_cancel(const MessageWord& delivered, const MessageWord& own);

/// Recovers W_dest, checking that `own` belongs to the colocated source.
MessageWord recover_at(int destination, const MessageWord& delivered, const MessageWord& own,
                       const channel::NetworkTopology& topology);

using Deliveries = std::map<int, MessageWord>;  ///< destination -> delivered coded word

/// Online phase. Implementations may only transmit W'_1 and W'_2.
class DeliveryStrategy {
 public:
  virtual ~DeliveryStrategy() = default;
  virtual std::string name() const = 0;
  virtual Deliveries deliver(const RelayCache& cache, const TargetMap& targets) const = 0;
  virtual Rational nominal_dof(const SuperRelay& relay) const = 0;
};

/// Hands every target its word directly.
class GenieDelivery final : public DeliveryStrategy {
 public:
  std::string name() const override { return "genie"; }
  Deliveries deliver(const RelayCache& cache, const TargetMap& targets) const override;
  /// 4 N / (N + 1) with N the super-relay antenna count.
  Rational nominal_dof(const SuperRelay& relay) const override;
};

/// Alternating slots: W'_1 to {D_1, D_3}, then W'_2 to {D_2, D_4}.
class TdmaDelivery final : public DeliveryStrategy {
 public:
  struct Slot {
    int word;
    std::vector<int> destinations;
  };

  std::string name() const override { return "tdma"; }
  std::vector<Slot> schedule(const TargetMap& targets) const;
  Deliveries deliver(const RelayCache& cache, const TargetMap& targets) const override;
  /// 2.
  Rational nominal_dof(const SuperRelay& relay) const override;
};

std::unique_ptr<DeliveryStrategy> make_delivery(const std::string& name);

}  // namespace relaylab::caching
