#pragma once

#include <stdexcept>
#include <string>

namespace seqrp {

// Raised when caller-supplied parameters violate an operation's preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a computation produces a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// x_t must be fixed before z_t is drawn.
class CausalityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}
}  // namespace detail

}  // namespace seqrp
