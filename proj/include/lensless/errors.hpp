#pragma once

#include <stdexcept>
#include <string>

namespace lensless {

// Raised when an iterative solver produces non-finite values.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

// Raised when a caller-supplied operator breaks a documented precondition
// (for example a non-symmetric operator handed to conjugate gradients).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lensless
