#pragma once

#include <stdexcept>
#include <string>

namespace disloc {

enum class ErrorCode {
  NoBoundary,
  EmptyConfiguration,
  InvalidRegime,
  RegionEmptyOrThin,
  UnboundedDomain,
  SolverDiverged,
  CoreTouchesBoundary,
  QuadratureStalled,
  CoincidentPoints,
  CoincidentDislocations,
  OutsideDomain,
  StepTooLarge,
  StiffnessBudgetExceeded,
  InvalidInitial,
  NotInRegime,
  NonpositiveDenominator,
  InsufficientSamples,
  IncompatibleDatum,
  SearchBudgetExceeded,
  EquilibriumNotFound,
  InvalidCurve,
  InvalidConfig,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoBoundary: return "NoBoundary";
    case ErrorCode::EmptyConfiguration: return "EmptyConfiguration";
    case ErrorCode::InvalidRegime: return "InvalidRegime";
    case ErrorCode::RegionEmptyOrThin: return "RegionEmptyOrThin";
    case ErrorCode::UnboundedDomain: return "UnboundedDomain";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::CoreTouchesBoundary: return "CoreTouchesBoundary";
    case ErrorCode::QuadratureStalled: return "QuadratureStalled";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::CoincidentDislocations: return "CoincidentDislocations";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::StiffnessBudgetExceeded: return "StiffnessBudgetExceeded";
    case ErrorCode::InvalidInitial: return "InvalidInitial";
    case ErrorCode::NotInRegime: return "NotInRegime";
    case ErrorCode::NonpositiveDenominator: return "NonpositiveDenominator";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::IncompatibleDatum: return "IncompatibleDatum";
    case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::EquilibriumNotFound: return "EquilibriumNotFound";
    case ErrorCode::InvalidCurve: return "InvalidCurve";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "UnknownError";
}

}  // namespace disloc
