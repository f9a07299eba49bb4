#pragma once

#include <stdexcept>
#include <string>

namespace modbpdn {

/// Invalid sizes, negative penalty weights, malformed configuration.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that has to be inverted is rank deficient or its condition
/// number exceeds kMaxCondition.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bound or threshold whose denominator is not positive.
class NotApplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration would exceed the combinatorial guard.
class FeasibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace modbpdn
