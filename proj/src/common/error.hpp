#pragma once

#include <stdexcept>
#include <string>

namespace kgeft {

// Error kinds raised by the core. Values are stable: the C API returns them
// verbatim as status codes.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  GridMismatch = 2,
  UnsupportedWeight = 3,
  CausalityBudgetExceeded = 4,
  QuadratureFailure = 5,
  StepRejected = 6,
  MinimizationFailed = 7,
  SupportSamplingEmpty = 8,
  StencilOutOfRange = 9,
  GridTooLarge = 10,
  InvalidHolderTriple = 11,
  InsufficientJetDepth = 12,
  BudgetExceeded = 13,
  NonConvergence = 14,
  TailFitInconclusive = 15,
  NotConverged = 16,
  ConventionMismatch = 17,
  CertificationMissing = 18,
  ParseError = 19,
  ValidationError = 20,
  MissingArtifact = 21,
  IoError = 22,
  SweepFailed = 23,
  Internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace kgeft
