#include "powcap/error.hpp"

namespace powcap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kNonpositiveDiagonalGain: return "nonpositive_diagonal_gain";
    case ErrorCode::kNegativeGain: return "negative_gain";
    case ErrorCode::kNonpositiveNoise: return "nonpositive_noise";
    case ErrorCode::kNonpositiveWeight: return "nonpositive_weight";
    case ErrorCode::kNonpositivePowerCap: return "nonpositive_power_cap";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kZeroRate: return "zero_rate";
    case ErrorCode::kNumericalFailure: return "numerical_failure";
    case ErrorCode::kInfeasibleRegion: return "infeasible_region";
    case ErrorCode::kNonConvergence: return "non_convergence";
    case ErrorCode::kQuadratureFailure: return "quadrature_failure";
    case ErrorCode::kMissingRates: return "missing_rates";
    case ErrorCode::kUnfittedApprox: return "unfitted_approx";
    case ErrorCode::kIterationCap: return "iteration_cap";
    case ErrorCode::kGridTooLarge: return "grid_too_large";
    case ErrorCode::kNoFeasibleGridPoint: return "no_feasible_grid_point";
  }
  return "unknown";
}

}  // namespace powcap
