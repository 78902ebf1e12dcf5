#include "fredholm/errors.hpp"

namespace fredholm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotCoercive: return "NotCoercive";
    case ErrorKind::ShiftSearchExceeded: return "ShiftSearchExceeded";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::ResonanceDetected: return "ResonanceDetected";
    case ErrorKind::AmbiguousResonance: return "AmbiguousResonance";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::NotSolvable: return "NotSolvable";
    case ErrorKind::PicardNotContracting: return "PicardNotContracting";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::InjectivityFailed: return "InjectivityFailed";
    case ErrorKind::BifurcationRootNotFound: return "BifurcationRootNotFound";
    case ErrorKind::IncompatibleCoefficients: return "IncompatibleCoefficients";
    case ErrorKind::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorKind::PositivityViolated: return "PositivityViolated";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::RootBracketFailed: return "RootBracketFailed";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parse: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what, double value)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), value_(value) {}

}  // namespace fredholm
