#pragma once

#include <stdexcept>
#include <string>

namespace dmkp {

/// Invalid input: bad grid sizes, malformed config, mismatched shapes.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A symbol was evaluated where one of the x-frequencies vanishes.
class DegenerateFrequency : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A time step produced a non-finite coefficient.
class Instability : public NumericalError {
 public:
  Instability(const std::string& what, double time)
      : NumericalError(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Picard iteration left the contraction ball or ran out of iterations.
class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dmkp
