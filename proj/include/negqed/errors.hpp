#ifndef NEGQED_ERRORS_HPP
#define NEGQED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace negqed {

/// Invalid caller input: violated preconditions, malformed configuration,
/// non-physical parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of the numerics on otherwise valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature did not reach the requested tolerance.  Carries the
/// partial result magnitude and the achieved error estimate.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double partial, double error)
      : NumericalError(what + " (partial |value| = " + std::to_string(partial) +
                       ", error estimate = " + std::to_string(error) + ")"),
        partial_(partial),
        error_(error) {}

  double partial() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double partial_;
  double error_;
};

/// A Fresnel denominator vanished (guided-mode or surface-mode pole hit on
/// the integration path).
class PoleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The stack is lossless but supports bound modes on the real k_perp axis,
/// whose residues cannot be captured without loss.
class BoundModeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace negqed

#endif  // NEGQED_ERRORS_HPP
