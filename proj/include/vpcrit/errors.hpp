#pragma once

#include <stdexcept>
#include <string>

namespace vpcrit {

/// Base class for every failure raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (e.g. beta below 3/2, polytropic index 5 for a finite-radius solve).
class domain_error : public error {
 public:
  using error::error;
};

/// Step or subdivision budget exhausted.
class budget_error : public error {
 public:
  using error::error;
};

/// Step size underflow in the ODE integrator.
class stiffness_error : public error {
 public:
  using error::error;
};

/// Root finder called without a sign change.
class bracket_error : public error {
 public:
  using error::error;
};

/// Inputs that do not belong together, or two routes to the same quantity
/// that disagree beyond tolerance.
class consistency_error : public error {
 public:
  using error::error;
};

/// Sampling grid too coarse for the requested construction.
class resolution_error : public error {
 public:
  using error::error;
};

}  // namespace vpcrit
