#pragma once

#include <stdexcept>
#include <string>

namespace lmm {

enum class ErrorCode {
  ZeroLeadingAlpha,
  LengthMismatch,
  InvalidArgument,
  NoConvergence,
  SizeExceeded,
  SingularA,
  EmptyBlock,
  NotWeaklyStable,
  MissingExact,
  NewtonDiverged,
  StartUnavailable,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroLeadingAlpha: return "ZeroLeadingAlpha";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SizeExceeded: return "SizeExceeded";
    case ErrorCode::SingularA: return "SingularA";
    case ErrorCode::EmptyBlock: return "EmptyBlock";
    case ErrorCode::NotWeaklyStable: return "NotWeaklyStable";
    case ErrorCode::MissingExact: return "MissingExact";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::StartUnavailable: return "StartUnavailable";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lmm
