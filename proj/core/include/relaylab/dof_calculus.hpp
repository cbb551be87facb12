// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

// Exact DoF bounds and regions. Everything here is rational arithmetic; the
// only floating point is the condition number reported by the genie rank check.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "relaylab/channel_model.hpp"
#include "relaylab/rational.hpp"

namespace relaylab::dof {

/// a . d <= rhs
struct LinearConstraint {
  RationalVector coeffs;
  Rational rhs;
};

/// Constraints over d in R^K with d >= 0 implied.
class DofInequalitySystem {
 public:
  explicit DofInequalitySystem(int dimension);

  void add(RationalVector coeffs, Rational rhs);

  int dimension() const noexcept { return dimension_; }
  const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }
  bool contains(const RationalVector& coeffs, const Rational& rhs) const;
  bool feasible(const RationalVector& d) const;

 private:
  int dimension_;
  std::vector<LinearConstraint> constraints_;
};

struct DofRegion {
  DofInequalitySystem system;
  std::vector<RationalVector> vertices;  ///< lexicographically sorted, distinct
};

/// Every vertex of {d >= 0, A d <= b} by exhaustive K-subset enumeration over
/// the constraint rows and the nonnegativity facets. Sorted lexicographically.
std::vector<RationalVector> enumerate_vertices(const DofInequalitySystem& sys);

/// True iff every vertex is feasible and tight on >= K linearly independent
/// rows (nonnegativity facets included).
bool vertices_are_basic(const DofRegion& region);

struct LpOptimum {
  Rational value;
  RationalVector argmax;  ///< lexicographically smallest maximizer among vertices
};

/// max sum_i d_i. Throws UnboundedError if the region is unbounded in a
/// direction that increases the sum, or if it is empty.
LpOptimum max_sum(const DofInequalitySystem& sys);

/// The four triple-sum constraints d_a + d_b + d_c <= 2 of the non-caching
/// outer bound, K = 4.
DofInequalitySystem noncaching_outer_bound_system();

/// NK / (N + K - 1): compound MISO broadcast, N transmit antennas, K states.
Rational compound_dof(int N, int K);

/// 4 (N1 + N2) / (N1 + N2 + 1) with relay caching.
Rational caching_dof(int N1, int N2);

/// {d1/N + d2 <= 1, d1 + d2/N <= 1, d >= 0}.
DofRegion compound_region(int N);

/// (4M - 2) / M for the M-symbol-extension scheme.
Rational symmetric_scheme_dof(int M);

/// 2 * compound_dof(N, 1): one cached message per slot, decoded by both
/// receivers of its pair.
Rational tdma_caching_dof(int N);

/// Cut-set ceiling of the network's total DoF.
inline Rational cut_set_dof() { return Rational(4); }

struct RankCheck {
  bool full_rank = false;
  double condition_number = 0.0;
};

/// Rank test of H = [h_{2,R}; h_{4,R}] built from one slot's uplink gains
/// of sources 2 and 4 towards both relays.
RankCheck genie_matrix_full_rank(const channel::ChannelRealization& r, int slot,
                                 double cond_max = 1e8);
RankCheck genie_matrix_full_rank(const Eigen::Matrix2cd& H, double cond_max = 1e8);

}  // namespace relaylab::dof
