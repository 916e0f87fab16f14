#include "tau/error.hpp"

namespace tau {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DomainEscape: return "DomainEscape";
    case ErrorKind::DegenerateOrbit: return "DegenerateOrbit";
    case ErrorKind::LimitMismatch: return "LimitMismatch";
    case ErrorKind::CoincidentOrbits: return "CoincidentOrbits";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::TailNotConverged: return "TailNotConverged";
    case ErrorKind::FactorZero: return "FactorZero";
    case ErrorKind::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorKind::ZeroWeight: return "ZeroWeight";
    case ErrorKind::ZeroDivisor: return "ZeroDivisor";
    case ErrorKind::InconsistentWeights: return "InconsistentWeights";
    case ErrorKind::RiccatiBlowup: return "RiccatiBlowup";
    case ErrorKind::ZeroAlpha: return "ZeroAlpha";
    case ErrorKind::ZeroLift: return "ZeroLift";
    case ErrorKind::ZeroEigenvalue: return "ZeroEigenvalue";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::NotTriangular: return "NotTriangular";
    case ErrorKind::SingularGauge: return "SingularGauge";
    case ErrorKind::NegativeBaseRealExponent: return "NegativeBaseRealExponent";
    case ErrorKind::ParticularNotSolution: return "ParticularNotSolution";
    case ErrorKind::DegenerateQuadruple: return "DegenerateQuadruple";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::SingularLimit: return "SingularLimit";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace tau
