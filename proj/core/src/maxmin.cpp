#include "powcap/maxmin.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "powcap/error.hpp"

namespace powcap {

namespace {

void check_options(const SolverOptions& opts) {
  if (!(opts.eps > 0.0) || opts.max_bisect_iters <= 0 || !(opts.dinkelbach_tol > 0.0) ||
      opts.dinkelbach_max_iters <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "solver options must be positive");
  }
}

void check_link(const NetworkModel& model, Eigen::Index link) {
  if (link < 0 || link >= model.size()) {
    throw Error(ErrorCode::kInvalidArgument, "link index " + std::to_string(link) +
                                                 " out of range");
  }
}

LinearProgram region_lp(const NetworkModel& model, const ConstraintRows& extra,
                        Vector objective) {
  LinearProgram lp;
  lp.objective = std::move(objective);
  lp.a = extra.a;
  lp.b = extra.b;
  lp.lower = Vector::Zero(model.size());
  lp.upper = model.p_max;
  return lp;
}

}  // namespace

DinkelbachResult dinkelbach_max_sinr(const NetworkModel& model, Eigen::Index link,
                                     const ConstraintRows& extra, const SolverOptions& opts) {
  check_options(opts);
  check_link(model, link);
  const Eigen::Index m = model.size();
  if (extra.a.rows() > 0 && extra.a.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "extra constraints must have one column per link");
  }

  DinkelbachResult out;
  double lambda = 1.0;
  for (int iter = 1; iter <= opts.dinkelbach_max_iters; ++iter) {
    // maximize gain(i,i) p_i - lambda * sum_{j != i} gain(j,i) p_j
    Vector objective = -lambda * model.gain.col(link);
    objective[link] = model.gain(link, link);
    const LpSolution sol = solve_lp(region_lp(model, extra, objective));
    if (sol.status != LpStatus::kOptimal) {
      throw Error(ErrorCode::kInfeasibleRegion,
                  "constraint region for link " + std::to_string(link) + " is empty");
    }
    const double numerator = model.gain(link, link) * sol.x[link];
    const double denominator = interference(model, sol.x)[link];
    const double gap = numerator - lambda * denominator;
    out.iterations = iter;
    out.p_at_opt.p = sol.x;
    out.lambda_star = numerator / denominator;
    if (std::abs(gap) <= opts.dinkelbach_tol * denominator) return out;
    lambda = out.lambda_star;
  }
  throw Error(ErrorCode::kNonConvergence,
              "Dinkelbach did not converge for link " + std::to_string(link));
}

DinkelbachResult max_sinr(const NetworkModel& model, Eigen::Index link,
                          const std::optional<ConstraintRows>& extra, const SolverOptions& opts) {
  check_link(model, link);
  if (extra && extra->a.rows() > 0) return dinkelbach_max_sinr(model, link, *extra, opts);

  DinkelbachResult out;
  out.p_at_opt.p = Vector::Zero(model.size());
  out.p_at_opt.p[link] = model.p_max[link];
  out.lambda_star = model.gain(link, link) * model.p_max[link] / model.noise[link];
  out.iterations = 1;
  return out;
}

Vector threshold_gamma(const Vector& weights, double t) {
  return (t * weights.cwiseInverse().array()).expm1().matrix();
}

Bracket initial_bracket(const NetworkModel& model, const SolverOptions& opts) {
  validate(model);
  const Vector at_full = sinr(model, {model.p_max});
  Bracket b;
  b.t_min = (model.weights.array() * at_full.array().log1p()).minCoeff();
  b.t_max = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    const double best = max_sinr(model, i, std::nullopt, opts).lambda_star;
    b.t_max = std::min(b.t_max, model.weights[i] * std::log1p(best));
  }
  return b;
}

MaxMinResult solve_maxmin(const NetworkModel& model, const SolverOptions& opts) {
  check_options(opts);
  const Bracket start = initial_bracket(model, opts);

  MaxMinResult out;
  out.initial_t_min = start.t_min;
  out.initial_t_max = start.t_max;
  double t_min = start.t_min;
  double t_max = start.t_max;

  auto probe = [&](double t) {
    return solve_lp(threshold_constraints(model, threshold_gamma(model.weights, t)));
  };

  LpSolution best = probe(t_max);
  if (best.status == LpStatus::kOptimal) {
    t_min = t_max;
  } else {
    best = probe(t_min);
    if (best.status != LpStatus::kOptimal) {
      throw Error(ErrorCode::kNumericalFailure, "full-power threshold reported infeasible");
    }
    while (t_max - t_min >= opts.eps) {
      if (out.iterations >= opts.max_bisect_iters) {
        throw Error(ErrorCode::kNonConvergence, "bisection exceeded max_bisect_iters");
      }
      const double t = opts.midpoint == MidpointRule::kExponential
                           ? t_max + std::log1p(std::exp(t_min - t_max)) - std::numbers::ln2
                           : 0.5 * (t_min + t_max);
      // The exponential midpoint can round onto an endpoint once the gap is
      // near machine precision.
      if (!(t > t_min && t < t_max)) break;
      LpSolution sol = probe(t);
      const bool ok = sol.status == LpStatus::kOptimal;
      out.bracket_trace.push_back({t_min, t_max, t, ok});
      ++out.iterations;
      if (ok) {
        t_min = t;
        best = std::move(sol);
      } else {
        t_max = t;
      }
    }
  }

  out.t_star = t_min;
  out.p_star.p = best.x;
  out.objective_bits = weighted_min_capacity(model, out.p_star);
  return out;
}

}  // namespace powcap
