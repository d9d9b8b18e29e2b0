#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpaplan {

enum class ErrorCode {
  Syntax,
  UnsupportedConstruct,
  UnknownPredicate,
  UnknownObject,
  UnknownType,
  UnknownSchema,
  ArityMismatch,
  DuplicateName,
  InvalidProbability,
  DomainMismatch,
  GroundingLimitExceeded,
  NotApplicable,
  UndefinedValue,
  StateSpaceLimitExceeded,
  PolicyIncomplete,
  MalformedFile,
  InvalidParam,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "Syntax";
    case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::UnknownSchema: return "UnknownSchema";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::GroundingLimitExceeded: return "GroundingLimitExceeded";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::UndefinedValue: return "UndefinedValue";
    case ErrorCode::StateSpaceLimitExceeded: return "StateSpaceLimitExceeded";
    case ErrorCode::PolicyIncomplete: return "PolicyIncomplete";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::InvalidParam: return "InvalidParam";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gpaplan
