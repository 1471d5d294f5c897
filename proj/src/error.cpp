#include "latgeo/error.hpp"

namespace latgeo {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::EmbeddingOutOfRange: return "EmbeddingOutOfRange";
    case ErrorCode::NotSquarefree: return "NotSquarefree";
    case ErrorCode::ReducibleDetected: return "ReducibleDetected";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::RadiusTooLargeForBudget: return "RadiusTooLargeForBudget";
    case ErrorCode::UnsupportedScalarKind: return "UnsupportedScalarKind";
    case ErrorCode::DependentGenerators: return "DependentGenerators";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NotInDualSliceLattice: return "NotInDualSliceLattice";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::NonOrthonormalFrame: return "NonOrthonormalFrame";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::WindowIncomplete: return "WindowIncomplete";
    case ErrorCode::InconsistentParameters: return "InconsistentParameters";
    case ErrorCode::TooFewUsableRows: return "TooFewUsableRows";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::BlocksNotSpanning: return "BlocksNotSpanning";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace latgeo
