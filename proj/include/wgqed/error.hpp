#pragma once

#include <stdexcept>
#include <string>

namespace wgqed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a physical quantity (x = 0, omega <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid user-facing configuration: parameters, grids, detector layouts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Time-stepping plan that violates the stability bound.
class PlanError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature gave up before reaching the requested tolerance.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double best_real, double best_imag,
                   double error_estimate)
      : Error(what),
        best_real_(best_real),
        best_imag_(best_imag),
        error_estimate_(error_estimate) {}

  double best_real() const { return best_real_; }
  double best_imag() const { return best_imag_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double best_real_;
  double best_imag_;
  double error_estimate_;
};

}  // namespace wgqed
