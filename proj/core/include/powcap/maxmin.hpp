#pragma once

#include <optional>
#include <vector>

#include "powcap/linprog.hpp"
#include "powcap/model.hpp"

namespace powcap {

enum class MidpointRule {
  kExponential,  ///< t = ln((e^t_min + e^t_max) / 2)
  kArithmetic,   ///< t = (t_min + t_max) / 2
};

struct SolverOptions {
  /// Stop once t_max - t_min < eps (nats).
  double eps = 1e-6;
  int max_bisect_iters = 200;
  double dinkelbach_tol = 1e-10;
  int dinkelbach_max_iters = 100;
  MidpointRule midpoint = MidpointRule::kExponential;
};

/// One bisection probe: the bracket before the probe, the probed threshold
/// and whether its LP was feasible.
struct BracketStep {
  double t_min = 0.0;
  double t_max = 0.0;
  double t = 0.0;
  bool feasible = false;
};

struct MaxMinResult {
  /// Largest feasible threshold on w_i ln(1 + SINR_i), nats.
  double t_star = 0.0;
  /// min_i w_i log2(1 + SINR_i) evaluated at p_star.
  double objective_bits = 0.0;
  PowerAllocation p_star;
  int iterations = 0;
  double initial_t_min = 0.0;
  double initial_t_max = 0.0;
  std::vector<BracketStep> bracket_trace;
};

struct DinkelbachResult {
  double lambda_star = 0.0;
  PowerAllocation p_at_opt;
  int iterations = 0;
};

struct Bracket {
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Maximum of SINR_link over the power box intersected with `extra`.
/// Without extra rows the maximum is the closed-form vertex with every
/// interferer silent; with rows it runs Dinkelbach over LP subproblems.
DinkelbachResult max_sinr(const NetworkModel& model, Eigen::Index link,
                          const std::optional<ConstraintRows>& extra = std::nullopt,
                          const SolverOptions& opts = {});

/// Dinkelbach iteration from lambda = 1, unconditionally (no closed-form
/// shortcut). Throws kInfeasibleRegion or kNonConvergence.
DinkelbachResult dinkelbach_max_sinr(const NetworkModel& model, Eigen::Index link,
                                     const ConstraintRows& extra,
                                     const SolverOptions& opts = {});

/// SINR targets gamma_i = exp(t / w_i) - 1 for a nats-scale threshold t.
Vector threshold_gamma(const Vector& weights, double t);

Bracket initial_bracket(const NetworkModel& model, const SolverOptions& opts = {});

MaxMinResult solve_maxmin(const NetworkModel& model, const SolverOptions& opts = {});

}  // namespace powcap
