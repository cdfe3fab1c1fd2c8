#include "blowup/error.hpp"

namespace blowup {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::ContractViolation: return "contract_violation";
    case ErrorCode::BlowUpPassed: return "blow_up_passed";
    case ErrorCode::Domain: return "domain_error";
    case ErrorCode::Numerical: return "numerical_error";
    case ErrorCode::InsufficientData: return "insufficient_data";
    case ErrorCode::SingularFit: return "singular_fit";
    case ErrorCode::ExtractionUndefined: return "extraction_undefined";
    case ErrorCode::FitFailed: return "fit_failed";
    case ErrorCode::OutOfRange: return "out_of_range";
    case ErrorCode::Io: return "io_error";
  }
  return "unknown";
}

BlowUpPassed::BlowUpPassed(std::int64_t step_index)
    : Error(ErrorCode::BlowUpPassed,
            step_index >= 0 ? "blow-up passed at step " + std::to_string(step_index)
                            : std::string("blow-up passed: non-finite field values")),
      step_index_(step_index) {}

}  // namespace blowup
