#include "fbasin/error.hpp"

namespace fbasin {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kOutOfRange: return "out_of_range";
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kNotAttracting: return "not_attracting";
    case ErrorKind::kNoConvergence: return "no_convergence";
    case ErrorKind::kNearResonance: return "near_resonance";
    case ErrorKind::kZeroDiagonal: return "zero_diagonal";
    case ErrorKind::kOverflow: return "overflow";
    case ErrorKind::kBudgetExceeded: return "budget_exceeded";
    case ErrorKind::kDiverged: return "diverged";
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kValidation: return "validation_error";
    case ErrorKind::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace fbasin
