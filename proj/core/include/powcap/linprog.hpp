#pragma once

#include <string_view>

#include "powcap/model.hpp"

namespace powcap {

/// Relative row tolerance: a point is feasible when every row satisfies
/// a·x - b <= kFeasibilityTol * (1 + |b|).
inline constexpr double kFeasibilityTol = 1e-9;

/// maximize objective·x  subject to  a·x <= b,  lower <= x <= upper.
struct LinearProgram {
  Vector objective;
  Matrix a;
  Vector b;
  Vector lower;
  Vector upper;

  Eigen::Index num_vars() const { return objective.size(); }
  Eigen::Index num_rows() const { return a.rows(); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double value = 0.0;
  int iterations = 0;
};

/// Dense two-phase simplex with Bland's rule. Throws kNumericalFailure when
/// the pivot count exceeds 50 * (variables + rows) and kInvalidArgument on a
/// malformed program.
LpSolution solve_lp(const LinearProgram& lp);

/// Largest relative violation max_row (a·x - b) / (1 + |b|) including the
/// bounds; <= 0 means x is feasible.
double max_violation(const LinearProgram& lp, const Vector& x);

bool satisfies(const LinearProgram& lp, const Vector& x, double tol = kFeasibilityTol);

/// Rows of the SINR-threshold system over p:
///   gain(i,i) p_i >= gamma_i (sum_{j != i} gain(j,i) p_j + noise_i),
/// each divided by gain(i,i) and written as a·p <= b. Links with
/// gamma_i == 0 contribute no row.
struct ConstraintRows {
  Matrix a;
  Vector b;
};

ConstraintRows threshold_rows(const NetworkModel& model, const Vector& gamma);

/// The threshold rows with 0 <= p <= p_max and objective "minimize sum p".
LinearProgram threshold_constraints(const NetworkModel& model, const Vector& gamma);

/// Same system with a caller-supplied objective (maximized).
LinearProgram threshold_constraints(const NetworkModel& model, const Vector& gamma,
                                    const Vector& objective);

/// True iff the SINR targets gamma are jointly achievable within the power caps.
bool feasible(const NetworkModel& model, const Vector& gamma);

}  // namespace powcap
