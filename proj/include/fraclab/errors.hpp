#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fraclab {

enum class ErrorKind {
  DegenerateInput,
  InvalidDimension,
  DimensionMismatch,
  UndecidablePrimitive,
  EmptySample,
  UnboundedSet,
  NotClassicallyEvaluable,
  DivergentTail,
  PreconditionViolated,
  OutOfRange,
  DimensionTooLarge,
  NotSmooth,
  PointInsideU,
  PointOutsideOmega,
  NotOnBoundary,
  DegenerateGradient,
  UnboundedWithoutTruncation,
  NotAMinimumPoint,
  PredicateFailed,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; the kind selects the failure class.
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
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UndecidablePrimitive: return "UndecidablePrimitive";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::UnboundedSet: return "UnboundedSet";
    case ErrorKind::NotClassicallyEvaluable: return "NotClassicallyEvaluable";
    case ErrorKind::DivergentTail: return "DivergentTail";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::NotSmooth: return "NotSmooth";
    case ErrorKind::PointInsideU: return "PointInsideU";
    case ErrorKind::PointOutsideOmega: return "PointOutsideOmega";
    case ErrorKind::NotOnBoundary: return "NotOnBoundary";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::UnboundedWithoutTruncation: return "UnboundedWithoutTruncation";
    case ErrorKind::NotAMinimumPoint: return "NotAMinimumPoint";
    case ErrorKind::PredicateFailed: return "PredicateFailed";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fraclab
