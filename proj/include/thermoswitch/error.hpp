#pragma once

#include <stdexcept>
#include <string>

namespace thermoswitch {

enum class ErrorCode {
  InvalidArgument,
  NotHermitian,
  NoConvergence,
  DimensionMismatch,
  DegenerateSpectrum,
  InvalidState,
  InvalidPopulation,
  MismatchedPartitionFunction,
  UnknownLabel,
  IndexOutOfRange,
  NegativeRate,
  StepTooLarge,
  UnknownMode,
  SupportViolation,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidPopulation: return "InvalidPopulation";
    case ErrorCode::MismatchedPartitionFunction: return "MismatchedPartitionFunction";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::SupportViolation: return "SupportViolation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace thermoswitch
