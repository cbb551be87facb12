// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

#include "relaylab/channel_model.hpp"

namespace relaylab::testing {

inline double rel_err(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline double rel_err(std::complex<double> a, std::complex<double> b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace relaylab::testing
