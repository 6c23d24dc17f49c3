#pragma once

#include <stdexcept>
#include <string>

namespace rab {

/// Raised when caller-supplied data violates a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix expected to be positive definite has an eigenvalue below the floor.
class NotPositiveDefinite : public std::runtime_error {
public:
  NotPositiveDefinite(const std::string& what, double min_eigenvalue)
      : std::runtime_error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
  double min_eigenvalue_;
};

/// The conic solver did not return an optimal point.
class SolverFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An uncertainty set turned out to be empty.
class InfeasibleSet : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace rab
