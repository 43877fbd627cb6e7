#include "lightjump/error.hpp"

namespace lightjump {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::QuadratureOverflow: return "quadrature-overflow";
    case ErrorCode::NoRootFound: return "no-root-found";
    case ErrorCode::NotAStablePoint: return "not-a-stable-point";
    case ErrorCode::DegenerateEigenbasis: return "degenerate-eigenbasis";
    case ErrorCode::StepUnderflow: return "step-underflow";
    case ErrorCode::RejectedConservation: return "rejected-conservation";
    case ErrorCode::NoExitFound: return "no-exit-found";
    case ErrorCode::InsufficientPoints: return "insufficient-points";
    case ErrorCode::FitNotConverged: return "fit-not-converged";
    case ErrorCode::ConfigInvalid: return "config-invalid";
  }
  return "unknown";
}

}  // namespace lightjump
