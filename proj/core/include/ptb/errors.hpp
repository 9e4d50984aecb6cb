#pragma once

#include <stdexcept>
#include <string>

namespace ptb {

// Precondition or schema violation by the caller. CLI exit code 2.
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model primitives that cannot be used (bad constants, non-finite inputs).
class InvalidModelError : public ContractError {
 public:
  using ContractError::ContractError;
};

// A computation refused because it would exceed a configured size budget. CLI exit code 3.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ptb
