#pragma once

#include <stdexcept>
#include <string>

namespace regret_pricer {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad dimensions, negative valuations, invalid flags.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A candidate (utilities, allocation) violates a feasibility requirement.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// An exhaustive routine was asked to run above its configured size cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// The simplex core hit repeated tiny pivots and gave up.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Broken internal invariant (e.g. an always-feasible model reported infeasible).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace regret_pricer
