#pragma once

#include <string_view>
#include <vector>

#include "powcap/maxmin.hpp"
#include "powcap/model.hpp"
#include "powcap/posyfit.hpp"

namespace powcap {

/// One posynomial-<=-1 row in log variables: log sum_l exp(exponents.row(l)·x + log_coeffs[l]) <= 0.
struct GpRow {
  enum class Kind {
    kRateFloor,     ///< gain(i,i) p_i >= (2^{r_i} - 1)(interference_i)
    kCoupling,      ///< (gain(i,i) p_i)^{1/T} >= posy(t_i) z_i^{1/T}
    kInterference,  ///< z_i >= interference_i
    kPowerCap,      ///< p_i <= p_max_i
  };
  Kind kind = Kind::kPowerCap;
  Eigen::Index link = 0;
  Matrix exponents;
  Vector log_coeffs;
};

std::string_view to_string(GpRow::Kind kind);

/// Log-transformed latency program. Variables are laid out as
/// x = [ln p (M) | ln t (M) | ln z (M)].
struct GpProblem {
  NetworkModel model;
  PosynomialApprox approx;
  /// SINR floors 2^{r_i} - 1 derived from min_rates (bits).
  Vector rate_gamma;
  std::vector<GpRow> rows;

  Eigen::Index links() const { return model.size(); }
  Eigen::Index num_vars() const { return 3 * model.size(); }
  Eigen::Index power_var(Eigen::Index i) const { return i; }
  Eigen::Index rate_var(Eigen::Index i) const { return links() + i; }
  Eigen::Index aux_var(Eigen::Index i) const { return 2 * links() + i; }
};

struct GpOptions {
  double duality_tol = 1e-8;
  double mu0 = 1.0;
  double mu_factor = 10.0;
  int max_newton_steps = 500;
  double ls_alpha = 0.25;
  double ls_beta = 0.5;
};

enum class LatencyStatus { kOptimal, kInfeasible, kNonConverged };

std::string_view to_string(LatencyStatus status);

struct TightnessResidual {
  double coupling = 0.0;      ///< relative slack of the coupling row
  double interference = 0.0;  ///< relative slack of the interference row
  bool slack = false;         ///< either residual exceeds the threshold
};

struct LatencyResult {
  LatencyStatus status = LatencyStatus::kInfeasible;
  PowerAllocation p_star;
  Vector t_star_nats;
  Vector z_star;
  Vector rates_bits;
  Vector rates_nats;
  /// sum_i w_i / t_i, the surrogate objective.
  double objective = 0.0;
  /// sum_i w_i / log2(1 + SINR_i(p_star)).
  double objective_bits = 0.0;
  /// sum_i w_i / ln(1 + SINR_i(p_star)).
  double objective_nats = 0.0;
  std::vector<TightnessResidual> tightness;
  double kkt_residual = 0.0;
  double duality_measure = 0.0;
  int newton_steps = 0;
  /// Smallest (lambda_min / lambda_max) over every Newton Hessian.
  double min_hessian_eig_ratio = 1.0;
  int root_order = 0;
  std::string message;
};

/// Throws kMissingRates if the model has no rate floors and kUnfittedApprox
/// if the posynomial has no positive coefficient.
GpProblem build_gp(const NetworkModel& model, const PosynomialApprox& approx);

/// Barrier path-following Newton method on the log-domain program.
LatencyResult solve_gp(const GpProblem& problem, const GpOptions& opts = {});

inline constexpr double kTightnessTol = 1e-6;

/// Relative slack of the coupling and interference rows at a point.
std::vector<TightnessResidual> check_tightness(const LatencyResult& result,
                                               const GpProblem& problem,
                                               double threshold = kTightnessTol);

struct LatencyOptions {
  GpOptions gp;
  int root_order = 20;
  /// Size T from rate-constrained maximal SINRs instead of using root_order.
  bool adaptive_root_order = false;
  ExponentMode fit_mode = ExponentMode::kPuiseux;
  SolverOptions dinkelbach;
};

/// T = max_i ceil(w_i ln(1 + max SINR_i under the rate floors)), at least 2.
int adaptive_root_order(const NetworkModel& model, const SolverOptions& opts = {});

/// Rate-floor pre-check, posynomial fit on [0, T], GP build and solve.
LatencyResult solve_latency(const NetworkModel& model, const LatencyOptions& opts = {});

}  // namespace powcap
