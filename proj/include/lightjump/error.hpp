#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lightjump {

enum class ErrorCode {
  InvalidArgument,
  QuadratureOverflow,
  NoRootFound,
  NotAStablePoint,
  DegenerateEigenbasis,
  StepUnderflow,
  RejectedConservation,
  NoExitFound,
  InsufficientPoints,
  FitNotConverged,
  ConfigInvalid,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library surfaces as a SolverError carrying a code.
class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lightjump
