#pragma once

#include <stdexcept>
#include <string>

namespace memsx {

// Error taxonomy used across the library. Each class maps to one failure
// mode named in the module contracts; the CLI maps them onto exit codes.

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidProfile : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& msg, double residual_, int iterations_)
      : std::runtime_error(msg), residual(residual_), iterations(iterations_) {}
  double residual = 0.0;
  int iterations = 0;
};

struct SingularForce : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidBracket : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace memsx
