#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbasin {

enum class ErrorKind {
  kDimensionMismatch,
  kOutOfRange,
  kInvalidArgument,
  kNotAttracting,
  kNoConvergence,
  kNearResonance,
  kZeroDiagonal,
  kOverflow,
  kBudgetExceeded,
  kDiverged,
  kParse,
  kValidation,
  kIo,
};

// Stable identifier used in machine-readable error reports.
std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fbasin
