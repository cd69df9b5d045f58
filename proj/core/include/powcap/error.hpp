#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace powcap {

/// Machine-readable failure categories shared by every solver in the library.
enum class ErrorCode {
  kDimensionMismatch,
  kNonpositiveDiagonalGain,
  kNegativeGain,
  kNonpositiveNoise,
  kNonpositiveWeight,
  kNonpositivePowerCap,
  kInvalidArgument,
  kZeroRate,
  kNumericalFailure,
  kInfeasibleRegion,
  kNonConvergence,
  kQuadratureFailure,
  kMissingRates,
  kUnfittedApprox,
  kIterationCap,
  kGridTooLarge,
  kNoFeasibleGridPoint,
};

/// Stable snake_case identifier, used in JSON reports.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace powcap
