#include "qsweld/common.hpp"

namespace qsweld {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::WrongDegree: return "WrongDegree";
    case ErrorCode::DegenerateRatio: return "DegenerateRatio";
    case ErrorCode::ExtensionDegenerate: return "ExtensionDegenerate";
    case ErrorCode::RadiiOrder: return "RadiiOrder";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DegenerateJacobian: return "DegenerateJacobian";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::SelfIntersecting: return "SelfIntersecting";
    case ErrorCode::OrientationMismatch: return "OrientationMismatch";
    case ErrorCode::ChartMismatch: return "ChartMismatch";
    case ErrorCode::NonNested: return "NonNested";
    case ErrorCode::CollarTooWide: return "CollarTooWide";
    case ErrorCode::DegenerateAffine: return "DegenerateAffine";
    case ErrorCode::MonotonicityLost: return "MonotonicityLost";
    case ErrorCode::CutoutEscapes: return "CutoutEscapes";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::MissingSample: return "MissingSample";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RealValuedSelector: return "RealValuedSelector";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace qsweld
