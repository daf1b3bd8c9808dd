#ifndef MECPLAN_ERROR_H_
#define MECPLAN_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mecplan {

// Failure categories surfaced by the library. Structural problems with an
// instance or plan are reported as Violation lists instead (see model.h).
enum class ErrorCode {
  kCoincidentBs,
  kShapeMismatch,
  kEmptyLink,
  kNoConvergence,
  kMissingAllocation,
  kInfeasible,
  kNumericalStall,
  kTooLarge,
  kBadParameter,
  kInvalidInstance,
  kFormat,
};

std::string_view ErrorCodeName(ErrorCode code);

class PlanningError : public std::runtime_error {
 public:
  PlanningError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mecplan

#endif  // MECPLAN_ERROR_H_
