#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace qwalk {

// Machine-readable failure categories. The CLI maps every one of these to
// exit status 1 and prints the code name in its JSON error object.
enum class ErrorCode {
  InvalidInput,
  DimensionMismatch,
  NotUnitary,
  NotReflection,
  OverlappingPolygons,
  NonUnitPolygon,
  NotClique,
  CoverageViolation,
  EdgeInBothTessellations,
  PolygonIntersection,
  CoinNotOrthogonalReflection,
  HypothesisViolated,
  NotInjective,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotReflection: return "NotReflection";
    case ErrorCode::OverlappingPolygons: return "OverlappingPolygons";
    case ErrorCode::NonUnitPolygon: return "NonUnitPolygon";
    case ErrorCode::NotClique: return "NotClique";
    case ErrorCode::CoverageViolation: return "CoverageViolation";
    case ErrorCode::EdgeInBothTessellations: return "EdgeInBothTessellations";
    case ErrorCode::PolygonIntersection: return "PolygonIntersection";
    case ErrorCode::CoinNotOrthogonalReflection: return "CoinNotOrthogonalReflection";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NotInjective: return "NotInjective";
  }
  return "Unknown";
}

/// Validation failure. `subject` names the kind of object that violated the
/// check ("vertex", "y", "x", "edge", "polygon", ...) and `index` its position.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {},
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::move(message)),
        code_(code),
        subject_(std::move(subject)),
        index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::string subject_;
  std::optional<std::size_t> index_;
};

/// Unreadable/unwritable files. Kept apart from Error so callers can tell
/// environment failures from bad input.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qwalk
