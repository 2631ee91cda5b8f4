#pragma once

#include <stdexcept>
#include <string>

namespace confmetric {

/// Malformed or inconsistent input data (bad CSV, unknown label, zero
/// similarity, ...). The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an API precondition (bad argument, out-of-range option).
/// The CLI maps this to exit code 64.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-convergence, eigensolver breakdown, broken
/// monotonicity. The CLI maps this to exit code 70.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace confmetric
