// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaylab/dof_calculus.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "relaylab/errors.hpp"

namespace relaylab::dof {

namespace {

using Matrix = std::vector<RationalVector>;

Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Unique solution of A x = b, or nullopt when A is singular.
std::optional<RationalVector> solve_exact(Matrix A, RationalVector b) {
  const std::size_t n = A.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && A[pivot][col].numerator() == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(A[pivot], A[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || A[row][col].numerator() == 0) continue;
      const Rational f = A[row][col] / A[col][col];
      for (std::size_t j = col; j < n; ++j) A[row][j] -= f * A[col][j];
      b[row] -= f * b[col];
    }
  }
  RationalVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return x;
}

std::size_t exact_rank(Matrix A) {
  if (A.empty()) return 0;
  const std::size_t cols = A.front().size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < A.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < A.size() && A[pivot][col].numerator() == 0) ++pivot;
    if (pivot == A.size()) continue;
    std::swap(A[pivot], A[rank]);
    for (std::size_t row = rank + 1; row < A.size(); ++row) {
      if (A[row][col].numerator() == 0) continue;
      const Rational f = A[row][col] / A[rank][col];
      for (std::size_t j = col; j < cols; ++j) A[row][j] -= f * A[rank][j];
    }
    ++rank;
  }
  return rank;
}

/// Constraint rows followed by the nonnegativity facets -d_j <= 0.
std::vector<LinearConstraint> all_rows(const DofInequalitySystem& sys) {
  std::vector<LinearConstraint> rows = sys.constraints();
  const int K = sys.dimension();
  for (int j = 0; j < K; ++j) {
    RationalVector e(static_cast<std::size_t>(K), Rational(0));
    e[j] = Rational(-1);
    rows.push_back({std::move(e), Rational(0)});
  }
  return rows;
}

bool feasible_rows(const std::vector<LinearConstraint>& rows, const RationalVector& d) {
  return std::all_of(rows.begin(), rows.end(),
                     [&](const LinearConstraint& c) { return dot(c.coeffs, d) <= c.rhs; });
}

template <typename Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<RationalVector> vertices_of_rows(const std::vector<LinearConstraint>& rows, int K) {
  std::vector<RationalVector> vertices;
  for_each_subset(rows.size(), static_cast<std::size_t>(K), [&](const std::vector<std::size_t>& pick) {
    Matrix A;
    RationalVector b;
    for (auto r : pick) {
      A.push_back(rows[r].coeffs);
      b.push_back(rows[r].rhs);
    }
    auto x = solve_exact(std::move(A), std::move(b));
    if (x && feasible_rows(rows, *x)) vertices.push_back(std::move(*x));
  });
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  return vertices;
}

}  // namespace

DofInequalitySystem::DofInequalitySystem(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw PreconditionError("DoF system dimension must be >= 1");
}

void DofInequalitySystem::add(RationalVector coeffs, Rational rhs) {
  if (static_cast<int>(coeffs.size()) != dimension_)
    throw DimensionError("constraint has " + std::to_string(coeffs.size()) +
                         " coefficients, system dimension is " + std::to_string(dimension_));
  constraints_.push_back({std::move(coeffs), rhs});
}

bool DofInequalitySystem::contains(const RationalVector& coeffs, const Rational& rhs) const {
  return std::any_of(constraints_.begin(), constraints_.end(), [&](const LinearConstraint& c) {
    return c.coeffs == coeffs && c.rhs == rhs;
  });
}

bool DofInequalitySystem::feasible(const RationalVector& d) const {
  if (static_cast<int>(d.size()) != dimension_) throw DimensionError("point dimension mismatch");
  return feasible_rows(all_rows(*this), d);
}

std::vector<RationalVector> enumerate_vertices(const DofInequalitySystem& sys) {
  return vertices_of_rows(all_rows(sys), sys.dimension());
}

bool vertices_are_basic(const DofRegion& region) {
  const auto rows = all_rows(region.system);
  const auto K = static_cast<std::size_t>(region.system.dimension());
  for (const auto& v : region.vertices) {
    if (!feasible_rows(rows, v)) return false;
    Matrix tight;
    for (const auto& c : rows)
      if (dot(c.coeffs, v) == c.rhs) tight.push_back(c.coeffs);
    if (exact_rank(std::move(tight)) < K) return false;
  }
  return true;
}

LpOptimum max_sum(const DofInequalitySystem& sys) {
  const int K = sys.dimension();
  const RationalVector ones(static_cast<std::size_t>(K), Rational(1));

  // A nonzero r >= 0 with A r <= 0 increases the sum without bound; look for
  // one on the slice sum(r) = 1.
  DofInequalitySystem cone(K);
  for (const auto& c : sys.constraints()) cone.add(c.coeffs, Rational(0));
  cone.add(ones, Rational(1));
  RationalVector minus_ones(static_cast<std::size_t>(K), Rational(-1));
  cone.add(minus_ones, Rational(-1));
  if (!enumerate_vertices(cone).empty())
    throw UnboundedError("DoF region is unbounded along a direction with positive sum");

  const auto vertices = enumerate_vertices(sys);
  if (vertices.empty()) throw UnboundedError("DoF region is empty");

  LpOptimum best{dot(ones, vertices.front()), vertices.front()};
  for (const auto& v : vertices) {
    const Rational value = dot(ones, v);
    if (value > best.value) best = {value, v};  // sorted input keeps the lexicographic minimum on ties
  }
  return best;
}

DofInequalitySystem noncaching_outer_bound_system() {
  DofInequalitySystem sys(4);
  const Rational one(1), zero(0), two(2);
  sys.add({zero, one, one, one}, two);
  sys.add({one, one, one, zero}, two);
  sys.add({one, one, zero, one}, two);
  sys.add({one, zero, one, one}, two);
  return sys;
}

Rational compound_dof(int N, int K) {
  if (N < 1 || K < 1) throw PreconditionError("compound_dof needs N >= 1 and K >= 1");
  return Rational(static_cast<std::int64_t>(N) * K, N + K - 1);
}

Rational caching_dof(int N1, int N2) {
  if (N1 < 1 || N2 < 1) throw PreconditionError("caching_dof needs N1, N2 >= 1");
  const std::int64_t N = static_cast<std::int64_t>(N1) + N2;
  return Rational(4 * N, N + 1);
}

DofRegion compound_region(int N) {
  if (N < 1) throw PreconditionError("compound_region needs N >= 1");
  DofInequalitySystem sys(2);
  const Rational inv(1, N);
  sys.add({inv, Rational(1)}, Rational(1));
  sys.add({Rational(1), inv}, Rational(1));
  auto vertices = enumerate_vertices(sys);
  return DofRegion{std::move(sys), std::move(vertices)};
}

Rational symmetric_scheme_dof(int M) {
  if (M < 1) throw PreconditionError("symmetric_scheme_dof needs M >= 1");
  return Rational(4 * static_cast<std::int64_t>(M) - 2, M);
}

Rational tdma_caching_dof(int N) { return Rational(2) * compound_dof(N, 1); }

RankCheck genie_matrix_full_rank(const Eigen::Matrix2cd& H, double cond_max) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(H);
  const auto& s = svd.singularValues();
  RankCheck out;
  out.condition_number =
      s(1) == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / s(1);
  out.full_rank = out.condition_number <= cond_max;
  return out;
}

RankCheck genie_matrix_full_rank(const channel::ChannelRealization& r, int slot,
                                 double cond_max) {
  using channel::Link;
  Eigen::Matrix2cd H;
  H << r.gain(Link::up(2, 1), slot), r.gain(Link::up(2, 2), slot),
       r.gain(Link::up(4, 1), slot), r.gain(Link::up(4, 2), slot);
  return genie_matrix_full_rank(H, cond_max);
}

}  // namespace relaylab::dof
