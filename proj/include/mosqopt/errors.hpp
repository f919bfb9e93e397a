#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mosqopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state or argument contains non-finite or otherwise unusable values.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

// Parameter values violate a hard invariant (rates <= 0, nu outside (0,1), ...).
class InvalidParamsError : public Error {
 public:
  using Error::Error;
};

// Constraint data for the admissible set is malformed (C < 0 or Ubar < 0).
class InvalidConstraintError : public Error {
 public:
  using Error::Error;
};

// Integration produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int node)
      : Error(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

// Jacobian requested where the fertility-ratio denominator vanishes.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

// Eigenvalue iteration failed to meet its residual target.
class NumericalFailureError : public Error {
 public:
  using Error::Error;
};

// Every optimizer start diverged; carries the per-start log lines.
class OptimizationFailureError : public Error {
 public:
  OptimizationFailureError(const std::string& what, std::vector<std::string> logs)
      : Error(what), logs_(std::move(logs)) {}
  const std::vector<std::string>& start_logs() const { return logs_; }

 private:
  std::vector<std::string> logs_;
};

// Scenario configuration could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mosqopt
