#pragma once

#include <stdexcept>
#include <string>

namespace vasc {

/// Argument outside the domain of a formula (non-positive density, t <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature or root-finding did not reach the requested accuracy.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The ground state violates bP'(rho_bar) - a mu rho_bar > 0.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Roots closer than the separation tolerance; projections are undefined.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or vacuum during time stepping.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Requested dt exceeds the CFL-type bound.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or invalid configuration key; the message carries the key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Lyapunov dissipation envelope was violated.
class InequalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vasc
