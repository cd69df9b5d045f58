#pragma once

#include <functional>

namespace powcap {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

/// Globally adaptive Simpson rule: the subinterval with the largest Richardson
/// error estimate is bisected until the summed estimate is <= abs_tol.
/// Throws ErrorCode::kQuadratureFailure past max_intervals.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_intervals = 1'000'000);

}  // namespace powcap
