#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace congrulab {

enum class ErrorCode {
  NonOrthogonal,
  NotUnit,
  IndexOutOfRange,
  EmptyInput,
  NotOrthogonalMatrix,
  UnsupportedKind,
  UnsupportedShape,
  OriginOutside,
  DegenerateBody,
  NonConvex,
  EvaluationFailure,
  GridMismatch,
  AsymmetricRings,
  ConfigInvalid,
  DiameterHypothesisFailed,
  CongruenceHypothesisFailed,
  StarShapednessLost,
  InsufficientData,
  DegenerateProjection,
  TooFewVertices,
  BudgetExhausted,
  SpecParseError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonOrthogonal: return "NonOrthogonal";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NotOrthogonalMatrix: return "NotOrthogonalMatrix";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::OriginOutside: return "OriginOutside";
    case ErrorCode::DegenerateBody: return "DegenerateBody";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::AsymmetricRings: return "AsymmetricRings";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::DiameterHypothesisFailed: return "DiameterHypothesisFailed";
    case ErrorCode::CongruenceHypothesisFailed: return "CongruenceHypothesisFailed";
    case ErrorCode::StarShapednessLost: return "StarShapednessLost";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateProjection: return "DegenerateProjection";
    case ErrorCode::TooFewVertices: return "TooFewVertices";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::SpecParseError: return "SpecParseError";
  }
  return "Unknown";
}

}  // namespace congrulab
