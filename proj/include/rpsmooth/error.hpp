#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpsmooth {

enum class ErrorKind {
  InvalidParam,
  DeltaOutOfRange,
  SigmaOutOfRange,
  NoStabilizingSolution,
  IllConditioned,
  NoAdmissibleSolution,
  NotHurwitz,
  SingularInput,
  SingularSigma,
  DegenerateDenominator,
  FixedPointDiverged,
  Unstable,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the sweep
/// drivers in particular) can record it per grid point and keep going.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorKind::SigmaOutOfRange: return "SigmaOutOfRange";
    case ErrorKind::NoStabilizingSolution: return "NoStabilizingSolution";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::NoAdmissibleSolution: return "NoAdmissibleSolution";
    case ErrorKind::NotHurwitz: return "NotHurwitz";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::SingularSigma: return "SingularSigma";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::FixedPointDiverged: return "FixedPointDiverged";
    case ErrorKind::Unstable: return "Unstable";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace rpsmooth
