#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gcilab {

enum class ErrorCode {
  NotSymmetric,
  NotPSD,
  InvalidDimension,
  InvalidThreshold,
  OutOfRange,
  InvalidBounds,
  BudgetTooSmall,
  DimensionTooLarge,
  DimensionMismatch,
  ModelMismatch,
  DegenerateInput,
  ZeroDirection,
  SolverFailure,
  NotUnconditional,
  PremiseViolated,
  InvalidParameters,
  NotStandardized,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::NotUnconditional: return "NotUnconditional";
    case ErrorCode::PremiseViolated: return "PremiseViolated";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::NotStandardized: return "NotStandardized";
    case ErrorCode::ParseError: return "ParseError";
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

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gcilab
