// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace relaylab {

/// Exact rational, always kept in reduced form with a positive denominator.
using Rational = boost::rational<std::int64_t>;
using RationalVector = std::vector<Rational>;

/// "p/q", or "p" when q == 1.
std::string to_string(const Rational& r);
/// "(a, b, ...)" of reduced rationals.
std::string to_string(const RationalVector& v);
/// Accepts "p", "-p", "p/q".
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace relaylab
