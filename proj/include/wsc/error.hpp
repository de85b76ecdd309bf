#pragma once

#include <stdexcept>
#include <string>

namespace wsc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files (CSV rows, distance matrices, experiment specs).
struct LoadError : Error {
  using Error::Error;
};

// API contract violations: bad sizes, unsatisfied preconditions.
struct PreconditionError : Error {
  using Error::Error;
};

// Exact distance requested for a pair that was never strongly queried.
struct PermissionError : Error {
  using Error::Error;
};

// Constrained evaluation problems with an empty feasible set.
struct InfeasibleError : Error {
  using Error::Error;
};

}  // namespace wsc
