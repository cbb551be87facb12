// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaylab/caching.hpp"

#include <bit>

#include "relaylab/dof_calculus.hpp"
#include "relaylab/errors.hpp"
#include "relaylab/rng.hpp"

namespace relaylab::caching {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

void require_same_length(const MessageWord& a, const MessageWord& b) {
  if (a.size() != b.size())
    throw DimensionError("message length mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + " bits");
}

void require_populated(const RelayCache& cache) {
  if (!cache.populated()) throw PreconditionError("relay cache is empty (no placement phase)");
}

}  // namespace

MessageWord::MessageWord(std::size_t bits, int owner)
    : bits_(bits), owner_(owner), words_(word_count(bits), 0) {}

MessageWord MessageWord::from_string(const std::string& bits, int owner) {
  MessageWord w(bits.size(), owner);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1')
      throw PreconditionError("message string may only contain '0' and '1'");
    w.set(i, bits[i] == '1');
  }
  return w;
}

MessageWord MessageWord::random(std::size_t bits, int owner, std::uint64_t key) {
  MessageWord w(bits, owner);
  SplitMix64 gen(key);
  for (auto& word : w.words_) word = gen();
  if (const std::size_t tail = bits % kWordBits; tail != 0 && !w.words_.empty())
    w.words_.back() &= (std::uint64_t{1} << tail) - 1;
  return w;
}

bool MessageWord::bit(std::size_t i) const {
  if (i >= bits_) throw PreconditionError("bit index out of range");
  return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
}

void MessageWord::set(std::size_t i, bool value) {
  if (i >= bits_) throw PreconditionError("bit index out of range");
  const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  if (value)
    words_[i / kWordBits] |= mask;
  else
    words_[i / kWordBits] &= ~mask;
}

std::size_t MessageWord::popcount() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::string MessageWord::to_string() const {
  std::string s(bits_, '0');
  for (std::size_t i = 0; i < bits_; ++i)
    if (bit(i)) s[i] = '1';
  return s;
}

MessageWord MessageWord::with_owner(int owner) const {
  MessageWord out = *this;
  out.owner_ = owner;
  return out;
}

MessageWord operator^(const MessageWord& a, const MessageWord& b) {
  require_same_length(a, b);
  MessageWord out(a.bits_, 0);
  for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] = a.words_[i] ^ b.words_[i];
  return out;
}

RelayCache::RelayCache(MessageWord w1p, MessageWord w2p)
    : populated_(true), w1p_(std::move(w1p)), w2p_(std::move(w2p)) {
  require_same_length(w1p_, w2p_);
}

const MessageWord& RelayCache::word(int j) const {
  if (j == 1) return w1p_;
  if (j == 2) return w2p_;
  throw PreconditionError("cached word index must be 1 or 2");
}

RelayCache placement_phase(const MessageWord& w1, const MessageWord& w2, const MessageWord& w3,
                           const MessageWord& w4) {
  require_same_length(w1, w2);
  require_same_length(w1, w3);
  require_same_length(w1, w4);
  return RelayCache(w1 ^ w3, w2 ^ w4);
}

TargetMap default_target_map() { return {{1, {1, 3}}, {2, {2, 4}}}; }

SuperRelay super_relay(const channel::NetworkTopology& topology, const RelayCache& relay1,
                       const RelayCache& relay2) {
  require_populated(relay1);
  require_populated(relay2);
  if (!(relay1 == relay2)) throw PreconditionError("relay caches differ; no common super relay");
  const auto [n1, n2] = topology.relay_antennas();
  return SuperRelay{n1 + n2, relay1, default_target_map()};
}

MessageWord receiver_cancel(const MessageWord& delivered, const MessageWord& own) {
  return delivered ^ own;
}

MessageWord recover_at(int destination, const MessageWord& delivered, const MessageWord& own,
                       const channel::NetworkTopology& topology) {
  const int expected = topology.colocated_source(destination);
  if (own.owner() != expected)
    throw PreconditionError("destination " + std::to_string(destination) +
                            " holds the message of source " + std::to_string(expected) +
                            ", not of source " + std::to_string(own.owner()));
  return receiver_cancel(delivered, own).with_owner(destination);
}

Deliveries GenieDelivery::deliver(const RelayCache& cache, const TargetMap& targets) const {
  require_populated(cache);
  Deliveries out;
  for (const auto& [word, destinations] : targets)
    for (int d : destinations) out[d] = cache.word(word);
  return out;
}

Rational GenieDelivery::nominal_dof(const SuperRelay& relay) const {
  return Rational(2) * dof::compound_dof(relay.antennas, 2);
}

std::vector<TdmaDelivery::Slot> TdmaDelivery::schedule(const TargetMap& targets) const {
  std::vector<Slot> slots;
  for (const auto& [word, destinations] : targets) slots.push_back({word, destinations});
  return slots;
}

Deliveries TdmaDelivery::deliver(const RelayCache& cache, const TargetMap& targets) const {
  require_populated(cache);
  Deliveries out;
  for (const auto& slot : schedule(targets))
    for (int d : slot.destinations) out[d] = cache.word(slot.word);
  return out;
}

Rational TdmaDelivery::nominal_dof(const SuperRelay& relay) const {
  return dof::tdma_caching_dof(relay.antennas);
}

std::unique_ptr<DeliveryStrategy> make_delivery(const std::string& name) {
  if (name == "genie") return std::make_unique<GenieDelivery>();
  if (name == "tdma") return std::make_unique<TdmaDelivery>();
  throw PreconditionError("unknown delivery strategy '" + name + "'");
}

}  // namespace relaylab::caching
