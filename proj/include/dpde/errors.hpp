#pragma once

#include <stdexcept>
#include <string>

namespace dpde {

/// Input violates an operation's contract (admissibility window, support,
/// compatibility). The CLI maps this to exit code 2.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The computation ran but its result cannot be trusted (singular system,
/// overflow, NaN, failed post-check). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dpde
