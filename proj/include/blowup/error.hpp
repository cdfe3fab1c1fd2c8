#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace blowup {

enum class ErrorCode {
  InvalidArgument,
  ContractViolation,
  BlowUpPassed,
  Domain,
  Numerical,
  InsufficientData,
  SingularFit,
  ExtractionUndefined,
  FitFailed,
  OutOfRange,
  Io,
};

const char* error_code_name(ErrorCode code) noexcept;

// Base class for every error raised by the library. The C API maps `code()`
// onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-finite values or f(0) <= 0 after a step: the collapse reached the
// singularity. The previous state is the last valid one.
class BlowUpPassed : public Error {
 public:
  explicit BlowUpPassed(std::int64_t step_index);
  std::int64_t step_index() const noexcept { return step_index_; }

 private:
  std::int64_t step_index_;
};

}  // namespace blowup
