#pragma once

#include <stdexcept>
#include <string>

namespace obp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver failures: iteration limits, singular bases, lost feasibility.
struct NumericalFailure : Error {
  using Error::Error;
};

struct NotAMember : Error {
  using Error::Error;
};

struct NotInImage : Error {
  using Error::Error;
};

struct ZeroProbabilitySignal : Error {
  using Error::Error;
};

struct ConvergenceFailure : Error {
  ConvergenceFailure(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual;
};

struct EllipsoidIterationLimit : Error {
  EllipsoidIterationLimit(const std::string& what, double best_value, double bound)
      : Error(what), best_value(best_value), bound(bound) {}
  double best_value; // best objective found at a feasible center
  double bound;      // certified bound on the optimum (lower for minimization)
};

struct ConfigError : Error {
  using Error::Error;
};

struct InstanceValidationError : Error {
  using Error::Error;
};

struct ParamError : Error {
  using Error::Error;
};

} // namespace obp
