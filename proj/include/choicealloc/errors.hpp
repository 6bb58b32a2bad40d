#pragma once

#include <stdexcept>
#include <string>

namespace choicealloc {

// Malformed or invariant-violating input (bad scenario, infeasible allocation, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to meet its own accuracy contract.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace choicealloc
