#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sigbandit {

enum class ErrorCode {
  InvalidPath,
  GridMismatch,
  InvalidRange,
  BadChannel,
  NonPositiveValue,
  ShapeMismatch,
  NotAugmented,
  NotPositiveDefinite,
  BadConfig,
  BadArm,
  BadRound,
  NonPositiveGBM,
  MissingDemand,
  ReplayFormatError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::BadChannel: return "BadChannel";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotAugmented: return "NotAugmented";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::BadArm: return "BadArm";
    case ErrorCode::BadRound: return "BadRound";
    case ErrorCode::NonPositiveGBM: return "NonPositiveGBM";
    case ErrorCode::MissingDemand: return "MissingDemand";
    case ErrorCode::ReplayFormatError: return "ReplayFormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// Every failure in the library is reported through this exception; code()
// lets callers (and tests) branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sigbandit
