#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tau {

enum class ErrorKind {
  DomainEscape,
  DegenerateOrbit,
  LimitMismatch,
  CoincidentOrbits,
  GridMismatch,
  TailNotConverged,
  FactorZero,
  NonPositiveFactor,
  ZeroWeight,
  ZeroDivisor,
  InconsistentWeights,
  RiccatiBlowup,
  ZeroAlpha,
  ZeroLift,
  ZeroEigenvalue,
  SingularResolvent,
  NotTriangular,
  SingularGauge,
  NegativeBaseRealExponent,
  ParticularNotSolution,
  DegenerateQuadruple,
  DegenerateSystem,
  SingularLimit,
  VerificationFailed,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Numerical or contract failure raised by the library. The kind is stable
/// and is what the CLI maps to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tau
