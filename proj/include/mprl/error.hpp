#ifndef MPRL_ERROR_HPP_
#define MPRL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mprl {

// Raised when a caller violates a documented precondition (negative time,
// mismatched dimensions, out-of-range indices, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an input lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when a query reaches past a precomputed table.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Numerically singular linear system (e.g. vanishing Wronskian).
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Corrupt or incompatible file on disk.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced non-finite losses, ratios or actions.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace mprl

#endif  // MPRL_ERROR_HPP_
