// Copyright 2026 The relaylab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace relaylab {

/// Base class of every error thrown by relaylab.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes or stream counts do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling hit its retry cap.
class SamplingExhaustedError : public Error {
 public:
  using Error::Error;
};

/// A diagonal entry fell below the invertibility floor.
class SingularChannelError : public Error {
 public:
  using Error::Error;
};

/// An effective matrix is too ill-conditioned to invert.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition_number)
      : Error(what + " (condition number " + std::to_string(condition_number) + ")"),
        condition_number_(condition_number) {}

  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

/// The LP handed to max_sum has no finite optimum (or no feasible point).
class UnboundedError : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration; key() names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace relaylab
