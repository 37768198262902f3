#pragma once

#include <stdexcept>
#include <string>

namespace blochsim {

/// Invalid configuration or model parameters. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operand shapes do not agree (state vs operator, frame vs state, ...).
class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A precondition on a call was violated by the caller (e.g. Theta_nn requested).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Numerical failure during a computation. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class HermiticityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NormDriftError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateCrossingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FrameStepError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GaugeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace blochsim
