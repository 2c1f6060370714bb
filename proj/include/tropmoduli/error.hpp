#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tropmoduli {

enum class ErrorCode {
  DependentGenerators,
  ZeroVector,
  DimMismatch,
  UnknownFace,
  NoCofacets,
  InconsistentStrata,
  Disconnected,
  CycleInconsistency,
  Unstabilizable,
  UnbalancedType,
  NonzeroSlopeContraction,
  NotAlmost3Valent,
  MixedInvariants,
  PointNotInComplex,
  InvalidFamily,
  SeedNotInGraph,
  UnknownVertex,
  UnknownEdge,
  InvalidArgument,
  SchemaError,
  UnknownVerb,
  MissingInput,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DependentGenerators: return "DependentGenerators";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::UnknownFace: return "UnknownFace";
    case ErrorCode::NoCofacets: return "NoCofacets";
    case ErrorCode::InconsistentStrata: return "InconsistentStrata";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::CycleInconsistency: return "CycleInconsistency";
    case ErrorCode::Unstabilizable: return "Unstabilizable";
    case ErrorCode::UnbalancedType: return "UnbalancedType";
    case ErrorCode::NonzeroSlopeContraction: return "NonzeroSlopeContraction";
    case ErrorCode::NotAlmost3Valent: return "NotAlmost3Valent";
    case ErrorCode::MixedInvariants: return "MixedInvariants";
    case ErrorCode::PointNotInComplex: return "PointNotInComplex";
    case ErrorCode::InvalidFamily: return "InvalidFamily";
    case ErrorCode::SeedNotInGraph: return "SeedNotInGraph";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnknownVerb: return "UnknownVerb";
    case ErrorCode::MissingInput: return "MissingInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tropmoduli
