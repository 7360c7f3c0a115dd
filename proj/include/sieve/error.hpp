#pragma once

#include <stdexcept>
#include <string>

namespace sieve {

// Invalid argument values: x outside [0,1], basis index < 1, D' > d, ...
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent input data: shape mismatches, non-finite
// values, degenerate feature columns, bad CSV or model files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured resource limit would be exceeded (index-matrix entry budget,
// integer register width in the divisor utilities).
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure that is reported rather than papered over
// (e.g. a Gram matrix that stays indefinite after the jitter retry).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] void throw_domain(const std::string& what);
[[noreturn]] void throw_input(const std::string& what);

}  // namespace sieve
