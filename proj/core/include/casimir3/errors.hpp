#pragma once

#include <stdexcept>
#include <string>

namespace casimir3 {

// All library failures derive from Error so callers (the CLI in particular)
// can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative
// frequency, non-monotone separations, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration: bad file contents, unknown keys, violated type
// invariants. `key_path()` names the offending entry when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string key_path = {})
      : Error(key_path.empty() ? message : key_path + ": " + message),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

// Argument outside the range covered by a tabulation or grid.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Contract precondition violated (PFA validity, resonance requirement, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Quadrature / integration / fitting did not produce a trustworthy number.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Two surfaces touched (gap fell below the contact threshold or left the
// tabulated range) during time integration.
class ContactError : public NumericalError {
 public:
  ContactError(const std::string& message, double time)
      : NumericalError(message), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Least-squares fit failures in the calibration module.
class FitError : public Error {
 public:
  using Error::Error;
};

// Amplitude extraction could not certify a steady state.
class SteadyStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Linearized dynamics grew past the linear-regime bound.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& message, double time)
      : Error(message), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace casimir3
