#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geodev {

enum class Errc {
  // geometry
  UnsupportedName,
  InvalidParams,
  EnergyBelowPotential,
  OutsideChart,
  IllConditionedMetric,
  DimensionMismatch,
  // geodesic_flow
  LeftChart,
  BlowUp,
  NotUnitSpeed,
  FrameDrift,
  GridMismatch,
  // deviation
  AsymmetryTooLarge,
  GridExceeded,
  // spectral_split
  NotSymmetric,
  // dilation
  EmptySubspace,
  NotInSubspace,
  DivergentIntegral,
  WrongTimeDirection,
  RangeNotCovered,
  // fock
  SpaceMismatch,
  NotContraction,
  NotProjection,
  WrongBranch,
  SOutOfRange,
  TooLarge,
  InvariantViolation,
  // configuration
  ConfigParse,
  ConfigMissingKey,
  ConfigInvalidValue,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-readable code. Every library failure is
/// reported through this type; the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  Errc code() const noexcept { return code_; }
  /// The text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace geodev
