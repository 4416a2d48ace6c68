#pragma once

#include <stdexcept>
#include <string>

namespace growent {

// Rejected input: malformed distribution, bad parameter, bad config.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// sigma_n == 0 where an operation divides by it.
class DegenerateVariance : public std::domain_error {
 public:
  explicit DegenerateVariance(const std::string& where)
      : std::domain_error(where + ": degenerate variance (sigma == 0)") {}
};

// Floating point trouble that would otherwise be silent (underflow etc).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace growent
