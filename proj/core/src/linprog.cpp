#include "powcap/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "powcap/error.hpp"

namespace powcap {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

// Row-major tableau [rows x (cols + 1)]; the last column is the right-hand side.
class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows * (cols + 1)), 0.0),
        basis_(static_cast<size_t>(rows), -1) {}

  double& at(Eigen::Index r, Eigen::Index c) {
    return data_[static_cast<size_t>(r * (cols_ + 1) + c)];
  }
  double at(Eigen::Index r, Eigen::Index c) const {
    return data_[static_cast<size_t>(r * (cols_ + 1) + c)];
  }
  double& rhs(Eigen::Index r) { return at(r, cols_); }
  double rhs(Eigen::Index r) const { return at(r, cols_); }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index& basic(Eigen::Index r) { return basis_[static_cast<size_t>(r)]; }
  Eigen::Index basic(Eigen::Index r) const { return basis_[static_cast<size_t>(r)]; }

  void pivot(Eigen::Index pr, Eigen::Index pc) {
    const double inv = 1.0 / at(pr, pc);
    for (Eigen::Index c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (Eigen::Index c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basic(pr) = pc;
  }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  std::vector<double> data_;
  std::vector<Eigen::Index> basis_;
};

enum class PhaseResult { kOptimal, kUnbounded };

// Maximizes cost·x over the tableau using only columns < allowed_cols as
// entering candidates. Bland's rule: smallest improving column enters, ties in
// the ratio test go to the smallest basic index.
PhaseResult run_phase(Tableau& t, const std::vector<double>& cost, Eigen::Index allowed_cols,
                      int& iterations, int cap) {
  std::vector<double> reduced(static_cast<size_t>(t.cols()));
  while (true) {
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
      double z = 0.0;
      for (Eigen::Index r = 0; r < t.rows(); ++r) {
        z += cost[static_cast<size_t>(t.basic(r))] * t.at(r, c);
      }
      reduced[static_cast<size_t>(c)] = cost[static_cast<size_t>(c)] - z;
    }
    Eigen::Index enter = -1;
    for (Eigen::Index c = 0; c < allowed_cols; ++c) {
      if (reduced[static_cast<size_t>(c)] > kCostTol) {
        enter = c;
        break;
      }
    }
    if (enter < 0) return PhaseResult::kOptimal;

    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(t.rhs(r), 0.0) / a;
      if (leave < 0 || ratio < best_ratio - 1e-14) {
        best_ratio = ratio;
        leave = r;
      } else if (ratio <= best_ratio + 1e-14 && t.basic(r) < t.basic(leave)) {
        leave = r;
      }
    }
    if (leave < 0) return PhaseResult::kUnbounded;
    if (++iterations > cap) {
      throw Error(ErrorCode::kNumericalFailure,
                  "simplex exceeded " + std::to_string(cap) + " pivots");
    }
    t.pivot(leave, enter);
  }
}

void check_shape(const LinearProgram& lp) {
  const Eigen::Index n = lp.num_vars();
  if (n < 1 || lp.a.cols() != n || lp.b.size() != lp.a.rows() || lp.lower.size() != n ||
      lp.upper.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "linear program dimensions are inconsistent");
  }
  if (!lp.lower.allFinite() || !lp.upper.allFinite() || !lp.a.allFinite() ||
      !lp.b.allFinite() || !lp.objective.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "linear program data must be finite");
  }
  if ((lp.lower.array() > lp.upper.array()).any()) {
    throw Error(ErrorCode::kInvalidArgument, "lower bound exceeds upper bound");
  }
}

}  // namespace

double max_violation(const LinearProgram& lp, const Vector& x) {
  double worst = -std::numeric_limits<double>::infinity();
  if (lp.num_rows() > 0) {
    const Vector ax = lp.a * x;
    for (Eigen::Index r = 0; r < lp.num_rows(); ++r) {
      worst = std::max(worst, (ax[r] - lp.b[r]) / (1.0 + std::abs(lp.b[r])));
    }
  }
  for (Eigen::Index j = 0; j < lp.num_vars(); ++j) {
    worst = std::max(worst, (lp.lower[j] - x[j]) / (1.0 + std::abs(lp.lower[j])));
    worst = std::max(worst, (x[j] - lp.upper[j]) / (1.0 + std::abs(lp.upper[j])));
  }
  return worst;
}

bool satisfies(const LinearProgram& lp, const Vector& x, double tol) {
  return max_violation(lp, x) <= tol;
}

LpSolution solve_lp(const LinearProgram& lp) {
  check_shape(lp);
  const Eigen::Index n = lp.num_vars();

  // Shift to y = x - lower >= 0 and append y <= upper - lower as ordinary rows.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  const Vector shifted_b = lp.b - lp.a * lp.lower;
  for (Eigen::Index r = 0; r < lp.num_rows(); ++r) {
    Eigen::VectorXd row = lp.a.row(r).transpose();
    double b = shifted_b[r];
    const double scale = row.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
      if (b < -kFeasibilityTol * (1.0 + std::abs(lp.b[r]))) return {};
      continue;
    }
    rows.push_back(row / scale);
    rhs.push_back(b / scale);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    row[j] = 1.0;
    rows.push_back(row);
    rhs.push_back(lp.upper[j] - lp.lower[j]);
  }

  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::Index num_art = 0;
  for (double b : rhs) num_art += b < 0.0 ? 1 : 0;

  // Columns: [y (n) | slacks (m) | artificials (num_art)].
  const Eigen::Index art0 = n + m;
  Tableau t(m, n + m + num_art);
  Eigen::Index next_art = art0;
  for (Eigen::Index r = 0; r < m; ++r) {
    const double sign = rhs[static_cast<size_t>(r)] < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) t.at(r, j) = sign * rows[static_cast<size_t>(r)][j];
    t.at(r, n + r) = sign;
    t.rhs(r) = sign * rhs[static_cast<size_t>(r)];
    if (sign > 0.0) {
      t.basic(r) = n + r;
    } else {
      t.at(r, next_art) = 1.0;
      t.basic(r) = next_art++;
    }
  }

  const int cap = static_cast<int>(50 * (n + m));
  LpSolution sol;

  auto extract = [&]() {
    Vector y = Vector::Zero(n);
    for (Eigen::Index r = 0; r < m; ++r) {
      if (t.basic(r) < n) y[t.basic(r)] = t.rhs(r);
    }
    return Vector(y + lp.lower);
  };

  if (num_art > 0) {
    std::vector<double> phase1(static_cast<size_t>(t.cols()), 0.0);
    for (Eigen::Index c = art0; c < t.cols(); ++c) phase1[static_cast<size_t>(c)] = -1.0;
    run_phase(t, phase1, t.cols(), sol.iterations, cap);
    Vector x = extract().cwiseMax(lp.lower).cwiseMin(lp.upper);
    if (!satisfies(lp, x)) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where a structural or
    // slack column can replace them; rows without one are redundant.
    for (Eigen::Index r = 0; r < m; ++r) {
      if (t.basic(r) < art0) continue;
      for (Eigen::Index c = 0; c < art0; ++c) {
        if (std::abs(t.at(r, c)) > 1e-9) {
          t.pivot(r, c);
          break;
        }
      }
    }
  }

  std::vector<double> phase2(static_cast<size_t>(t.cols()), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) phase2[static_cast<size_t>(j)] = lp.objective[j];
  if (run_phase(t, phase2, art0, sol.iterations, cap) == PhaseResult::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  sol.x = extract().cwiseMax(lp.lower).cwiseMin(lp.upper);
  sol.value = lp.objective.dot(sol.x);
  sol.status = LpStatus::kOptimal;
  return sol;
}

ConstraintRows threshold_rows(const NetworkModel& model, const Vector& gamma) {
  const Eigen::Index m = model.size();
  if (gamma.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "gamma must have one entry per link");
  }
  if (!(gamma.array() >= 0.0).all() || !gamma.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "SINR thresholds must be finite and >= 0");
  }
  ConstraintRows out;
  const Eigen::Index active = (gamma.array() > 0.0).count();
  out.a = Matrix::Zero(active, m);
  out.b = Vector::Zero(active);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (gamma[i] == 0.0) continue;
    const double direct = model.gain(i, i);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != i) out.a(r, j) = gamma[i] * model.gain(j, i) / direct;
    }
    out.a(r, i) = -1.0;
    out.b[r] = -gamma[i] * model.noise[i] / direct;
    ++r;
  }
  return out;
}

LinearProgram threshold_constraints(const NetworkModel& model, const Vector& gamma,
                                    const Vector& objective) {
  ConstraintRows rows = threshold_rows(model, gamma);
  LinearProgram lp;
  lp.objective = objective;
  lp.a = std::move(rows.a);
  lp.b = std::move(rows.b);
  lp.lower = Vector::Zero(model.size());
  lp.upper = model.p_max;
  return lp;
}

LinearProgram threshold_constraints(const NetworkModel& model, const Vector& gamma) {
  return threshold_constraints(model, gamma, -Vector::Ones(model.size()));
}

bool feasible(const NetworkModel& model, const Vector& gamma) {
  return solve_lp(threshold_constraints(model, gamma)).status == LpStatus::kOptimal;
}

}  // namespace powcap
