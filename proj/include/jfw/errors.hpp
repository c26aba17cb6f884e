#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jfw {

enum class ErrorKind {
  DegenerateParams,
  QuadratureUnderResolved,
  NoConvergence,
  ZeroMatrix,
  ShapeMismatch,
  DegenerateTestSet,
  InfeasibleStart,
  BetaZero,
  ParseError,
  EmptyDataset,
  DuplicateRating,
  ConfigError,
  InsufficientData,
  NonpositiveGap,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateParams: return "DegenerateParams";
    case ErrorKind::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DegenerateTestSet: return "DegenerateTestSet";
    case ErrorKind::InfeasibleStart: return "InfeasibleStart";
    case ErrorKind::BetaZero: return "BetaZero";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::DuplicateRating: return "DuplicateRating";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonpositiveGap: return "NonpositiveGap";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_dataset_error() const noexcept {
    return kind_ == ErrorKind::ParseError || kind_ == ErrorKind::EmptyDataset ||
           kind_ == ErrorKind::DuplicateRating;
  }

 private:
  ErrorKind kind_;
};

}  // namespace jfw
