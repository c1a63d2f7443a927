#pragma once

#include <stdexcept>
#include <string>

namespace basinlab {

enum class ErrorCode {
  InvalidArgument,
  DegreeTooSmall,
  NotCentered,
  DegenerateLeadingCoefficient,
  NotInBasin,
  DerivativeUnderflow,
  BelowCriticalHeight,
  OnSingularLeafAmbiguous,
  StepLimit,
  NewtonDivergence,
  NonGenericHeight,
  SeedMiss,
  ContainsSingularity,
  InconsistentDegrees,
  LiftFailure,
  Stalled,
  NotInShiftLocus,
  SolveFailure,
  DegreeMismatch,
  ParseError,
};

const char* to_string(ErrorCode code);

// Precondition failures map to CLI exit code 2, numerical failures to 3.
bool is_precondition(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace basinlab
