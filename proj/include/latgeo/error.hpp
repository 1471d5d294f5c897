#pragma once

#include <stdexcept>
#include <string>

namespace latgeo {

// Every failure mode in the library maps to one of these codes.  A single
// exception type keeps call sites uniform; tests match on the code.
enum class ErrorCode {
  DivisionByZero,
  FieldMismatch,
  EmbeddingOutOfRange,
  NotSquarefree,
  ReducibleDetected,
  InvalidDims,
  SingularBasis,
  NonPositiveParameter,
  RadiusTooLargeForBudget,
  UnsupportedScalarKind,
  DependentGenerators,
  InvariantViolation,
  NotInDualSliceLattice,
  DegenerateFrame,
  NonOrthonormalFrame,
  FrameMismatch,
  UnsupportedKind,
  OracleFailure,
  BudgetExceeded,
  WindowIncomplete,
  InconsistentParameters,
  TooFewUsableRows,
  ZeroNorm,
  BlocksNotSpanning,
  ParseError,
  IoError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace latgeo
