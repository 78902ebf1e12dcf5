#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace fredholm {

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  NotCoercive,
  ShiftSearchExceeded,
  EigenFailure,
  ResonanceDetected,
  AmbiguousResonance,
  PreconditionViolated,
  NotSolvable,
  PicardNotContracting,
  MaxIterExceeded,
  NewtonDiverged,
  InjectivityFailed,
  BifurcationRootNotFound,
  IncompatibleCoefficients,
  MeshTooCoarse,
  PositivityViolated,
  InvalidExponent,
  RootBracketFailed,
  Io,
  Parse,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure in the library is reported through this type. `value()` holds
// the numeric payload some kinds carry (the min pivot for NotCoercive, the
// solvability defect for NotSolvable, the offending grid point for per-lambda
// failures); it is NaN otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double value = kNoValue);

  ErrorKind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }

  static constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

 private:
  ErrorKind kind_;
  double value_;
};

}  // namespace fredholm
