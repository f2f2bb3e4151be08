#include "enif/error.hpp"

namespace enif {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::not_positive_definite: return "NotPositiveDefinite";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::order_too_large: return "OrderTooLarge";
    case ErrorCode::too_few_states: return "TooFewStates";
    case ErrorCode::non_stationary: return "NonStationary";
    case ErrorCode::unstable_step: return "UnstableStep";
    case ErrorCode::non_finite: return "NonFinite";
    case ErrorCode::grid_too_large_for_oracle: return "GridTooLargeForOracle";
    case ErrorCode::degenerate_element: return "DegenerateElement";
    case ErrorCode::underdetermined_row: return "UnderdeterminedRow";
    case ErrorCode::zero_residual: return "ZeroResidual";
    case ErrorCode::underdetermined: return "Underdetermined";
    case ErrorCode::weights_not_normalised: return "WeightsNotNormalised";
    case ErrorCode::singular_innovation_covariance: return "SingularInnovationCovariance";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

bool Error::is_numerical() const noexcept {
  switch (code_) {
    case ErrorCode::not_positive_definite:
    case ErrorCode::non_finite:
    case ErrorCode::underdetermined_row:
    case ErrorCode::zero_residual:
    case ErrorCode::underdetermined:
    case ErrorCode::singular_innovation_covariance:
      return true;
    default:
      return false;
  }
}

}  // namespace enif
