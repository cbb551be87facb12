// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace relaylab {

/// SplitMix64 finalizer. Used both as the generator step and as a key mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a tuple of integers into one stream key. Order matters.
inline std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto p : parts) h = mix64(h ^ mix64(p + 0x9e3779b97f4a7c15ULL));
  return h;
}

/// Counter-based SplitMix64 generator; satisfies UniformRandomBitGenerator.
/// Every independent stream (seed, slot, link, trial, ...) gets its own key,
/// so results never depend on the order in which streams are consumed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Circularly symmetric complex Gaussian source CN(0, variance).
class ComplexGaussian {
 public:
  explicit ComplexGaussian(std::uint64_t key, double variance = 1.0)
      : gen_(key), normal_(0.0, std::sqrt(variance / 2.0)) {}

  std::complex<double> operator()() {
    const double re = normal_(gen_);
    const double im = normal_(gen_);
    return {re, im};
  }

  SplitMix64& engine() noexcept { return gen_; }

 private:
  SplitMix64 gen_;
  std::normal_distribution<double> normal_;
};

}  // namespace relaylab
