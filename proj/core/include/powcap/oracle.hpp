#pragma once

#include <random>

#include "powcap/model.hpp"

namespace powcap::oracle {

/// Uniform grid over [0, p_max_i] on every axis.
struct GridSpec {
  int points_per_axis = 101;
};

inline constexpr double kMaxGridPoints = 1e8;

struct FixedPointResult {
  bool feasible = false;
  /// Minimal power vector meeting the targets; empty when infeasible.
  Vector p_min;
  long iterations = 0;
};

/// Monotone interference-mapping iteration from p = 0:
///   p_i <- gamma_i (sum_{j != i} gain(j,i) p_j + noise_i) / gain(i,i).
/// Infeasible as soon as any component exceeds its cap. Throws
/// kIterationCap after 1e6 iterations.
FixedPointResult fixed_point_feasibility(const NetworkModel& model, const Vector& gamma);

struct GridResult {
  /// Best value found on the grid (bits-based objective).
  double objective_bits = 0.0;
  Vector p;
  /// The true optimum is within `certified_gap` of objective_bits (above it
  /// for max-min, below it for latency). Cell bounds come from the monotone
  /// corner (own power high, interferers low), refined best-first.
  double certified_gap = 0.0;
  long evaluated = 0;
};

/// Exhaustive max of min_i w_i log2(1 + SINR_i). Requires M <= 4.
GridResult grid_search_maxmin(const NetworkModel& model, const GridSpec& grid);

/// Exhaustive min of sum_i w_i / log2(1 + SINR_i) over grid points meeting
/// min_rates. Requires M <= 3.
GridResult grid_search_latency(const NetworkModel& model, const GridSpec& grid);

/// Random test network: off-diagonal gains 0.1 * U[0,1], diagonal U[0.1,1],
/// noise 1e-4 mW, unit power caps and weights.
NetworkModel random_instance(std::mt19937_64& rng, int links);

}  // namespace powcap::oracle
