#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlcl {

/// Rejected input: non-finite samples, grid mismatches, index violations.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration that violates a physical or structural constraint.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Time integration failed (non-finite values, blow-up).
class IntegrationError : public std::runtime_error {
public:
  IntegrationError(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  double achieved_tolerance() const noexcept { return achieved_; }

private:
  double achieved_;
};

/// Malformed or incompatible checkpoint file.
class CheckpointError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlcl
