#pragma once

#include <stdexcept>
#include <string>

namespace dualarm {

/// Malformed arguments: wrong dimensions, non-unit quaternions, degenerate primitives.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A rotation vector too close to 2*pi for the inverse exponential-map Jacobian.
class SingularRotation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A query whose start/goal (or corner states) violate the planner preconditions.
/// Distinct from a planning failure, which is reported as data.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Scenario or result file that cannot be parsed; carries the offending field path.
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

}  // namespace dualarm
