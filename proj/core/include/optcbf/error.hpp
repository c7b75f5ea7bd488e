#pragma once

#include <stdexcept>
#include <string>

namespace optcbf {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument breaks an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A construction parameter is out of range (non-positive gain, bound, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A user evaluator returned a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// State lies outside the constraint set b <= 0.
class OutsideSafeSetError : public Error {
 public:
  using Error::Error;
};

// The envelope of b'' is not strictly negative where it has to be.
class EnvelopeViolationError : public Error {
 public:
  using Error::Error;
};

// alpha'(b) blows up as b -> 0-; callers must take the boundary branch.
class SingularityGuardError : public Error {
 public:
  using Error::Error;
};

// Control coefficient of b'' vanishes, so no half-space on u exists.
class DegenerateConstraintError : public Error {
 public:
  using Error::Error;
};

// The state has left the recursively feasible set C2.
class SafetyViolationError : public Error {
 public:
  using Error::Error;
};

// A rollout did not reach its stop condition within the horizon.
class HorizonError : public Error {
 public:
  using Error::Error;
};

}  // namespace optcbf
