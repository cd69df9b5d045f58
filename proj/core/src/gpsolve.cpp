#include "powcap/gpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "powcap/error.hpp"
#include "powcap/linprog.hpp"

namespace powcap {

std::string_view to_string(GpRow::Kind kind) {
  switch (kind) {
    case GpRow::Kind::kRateFloor: return "rate_floor";
    case GpRow::Kind::kCoupling: return "coupling";
    case GpRow::Kind::kInterference: return "interference";
    case GpRow::Kind::kPowerCap: return "power_cap";
  }
  return "unknown";
}

std::string_view to_string(LatencyStatus status) {
  switch (status) {
    case LatencyStatus::kOptimal: return "optimal";
    case LatencyStatus::kInfeasible: return "infeasible";
    case LatencyStatus::kNonConverged: return "non_converged";
  }
  return "unknown";
}

namespace {

constexpr double kInitialSlack = 0.01;

Vector rate_floor_gamma(const Vector& min_rates) {
  return (min_rates.array() * std::numbers::ln2).expm1().matrix();
}

struct RowEval {
  double value = 0.0;  // log-sum-exp
  Vector grad;
  Matrix hess;
};

// Stable log-sum-exp of affine terms with gradient and Hessian.
RowEval eval_row(const GpRow& row, const Vector& x, bool with_hessian) {
  const Vector z = row.exponents * x + row.log_coeffs;
  const double peak = z.maxCoeff();
  const Vector w = (z.array() - peak).exp().matrix();
  const double total = w.sum();
  const Vector pi = w / total;
  RowEval out;
  out.value = peak + std::log(total);
  out.grad = row.exponents.transpose() * pi;
  if (with_hessian) {
    out.hess = row.exponents.transpose() * pi.asDiagonal() * row.exponents -
               out.grad * out.grad.transpose();
  }
  return out;
}

double row_value(const GpRow& row, const Vector& x) {
  const Vector z = row.exponents * x + row.log_coeffs;
  const double peak = z.maxCoeff();
  return peak + std::log((z.array() - peak).exp().sum());
}

class Barrier {
 public:
  explicit Barrier(const GpProblem& problem) : problem_(problem) {}

  double objective(const Vector& x) const {
    const Eigen::Index m = problem_.links();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      sum += problem_.model.weights[i] * std::exp(-x[problem_.rate_var(i)]);
    }
    return sum;
  }

  bool strictly_feasible(const Vector& x) const {
    for (const GpRow& row : problem_.rows) {
      if (!(row_value(row, x) < 0.0)) return false;
    }
    return true;
  }

  // tau * f0(x) - sum log(-f_k(x)); +inf outside the domain.
  double value(const Vector& x, double tau) const {
    double phi = tau * objective(x);
    for (const GpRow& row : problem_.rows) {
      const double f = row_value(row, x);
      if (!(f < 0.0)) return std::numeric_limits<double>::infinity();
      phi -= std::log(-f);
    }
    return phi;
  }

  void derivatives(const Vector& x, double tau, Vector& grad, Matrix& hess) const {
    const Eigen::Index n = problem_.num_vars();
    grad = Vector::Zero(n);
    hess = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < problem_.links(); ++i) {
      const Eigen::Index k = problem_.rate_var(i);
      const double term = problem_.model.weights[i] * std::exp(-x[k]);
      grad[k] -= tau * term;
      hess(k, k) += tau * term;
    }
    for (const GpRow& row : problem_.rows) {
      const RowEval r = eval_row(row, x, true);
      const double slack = -r.value;
      grad += r.grad / slack;
      hess += r.grad * r.grad.transpose() / (slack * slack) + r.hess / slack;
    }
  }

  // Stationarity residual of the Lagrangian with duals 1 / (tau * (-f_k)).
  double kkt_residual(const Vector& x, double tau) const {
    Vector g = Vector::Zero(problem_.num_vars());
    for (Eigen::Index i = 0; i < problem_.links(); ++i) {
      const Eigen::Index k = problem_.rate_var(i);
      g[k] -= problem_.model.weights[i] * std::exp(-x[k]);
    }
    for (const GpRow& row : problem_.rows) {
      const RowEval r = eval_row(row, x, false);
      g += r.grad / (tau * -r.value);
    }
    return g.cwiseAbs().maxCoeff();
  }

 private:
  const GpProblem& problem_;
};

// Strictly feasible powers: maximize a uniform margin s on the rate rows and
// both sides of the power box. Returns an empty vector when s* is not positive.
Vector strict_interior_powers(const NetworkModel& model, const Vector& gamma) {
  const Eigen::Index m = model.size();
  const ConstraintRows rates = threshold_rows(model, gamma);
  const Eigen::Index k = rates.a.rows();
  LinearProgram lp;
  lp.objective = Vector::Zero(m + 1);
  lp.objective[m] = 1.0;
  lp.a = Matrix::Zero(k + 2 * m, m + 1);
  lp.b = Vector::Zero(k + 2 * m);
  for (Eigen::Index r = 0; r < k; ++r) {
    lp.a.row(r).head(m) = rates.a.row(r);
    // Rows are normalized to own-power units; margin relative to the link's cap.
    Eigen::Index own = 0;
    rates.a.row(r).minCoeff(&own);
    lp.a(r, m) = model.p_max[own];
    lp.b[r] = rates.b[r];
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    lp.a(k + i, i) = -1.0;
    lp.a(k + i, m) = model.p_max[i];
    lp.a(k + m + i, i) = 1.0;
    lp.a(k + m + i, m) = model.p_max[i];
    lp.b[k + m + i] = model.p_max[i];
  }
  lp.lower = Vector::Zero(m + 1);
  lp.upper = Vector(m + 1);
  lp.upper.head(m) = model.p_max;
  lp.upper[m] = 1.0;
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal || !(sol.x[m] > 1e-9)) return {};
  return sol.x.head(m);
}

}  // namespace

GpProblem build_gp(const NetworkModel& model, const PosynomialApprox& approx) {
  validate(model);
  if (!model.min_rates) {
    throw Error(ErrorCode::kMissingRates, "latency minimization needs min_rates");
  }
  if (approx.coefficients.size() != approx.exponents.size() || approx.coefficients.empty() ||
      std::none_of(approx.coefficients.begin(), approx.coefficients.end(),
                   [](double c) { return c > 0.0; })) {
    throw Error(ErrorCode::kUnfittedApprox, "posynomial approximation has no coefficients");
  }

  GpProblem problem;
  problem.model = model;
  problem.approx = approx;
  problem.rate_gamma = rate_floor_gamma(*model.min_rates);

  const Eigen::Index m = model.size();
  const Eigen::Index n = problem.num_vars();
  const double inv_root = 1.0 / approx.root_order;

  auto interference_terms = [&](Eigen::Index i, Eigen::Index denom_var, double log_scale,
                                GpRow& row) {
    std::vector<std::pair<Eigen::Index, double>> terms;  // (var or -1 for noise, log coeff)
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != i && model.gain(j, i) > 0.0) {
        terms.emplace_back(problem.power_var(j), log_scale + std::log(model.gain(j, i)));
      }
    }
    terms.emplace_back(-1, log_scale + std::log(model.noise[i]));
    row.exponents = Matrix::Zero(static_cast<Eigen::Index>(terms.size()), n);
    row.log_coeffs = Vector(static_cast<Eigen::Index>(terms.size()));
    for (size_t l = 0; l < terms.size(); ++l) {
      const auto li = static_cast<Eigen::Index>(l);
      if (terms[l].first >= 0) row.exponents(li, terms[l].first) = 1.0;
      row.exponents(li, denom_var) -= 1.0;
      row.log_coeffs[li] = terms[l].second;
    }
  };

  for (Eigen::Index i = 0; i < m; ++i) {
    const double direct = model.gain(i, i);
    if (problem.rate_gamma[i] > 0.0) {
      GpRow row;
      row.kind = GpRow::Kind::kRateFloor;
      row.link = i;
      interference_terms(i, problem.power_var(i),
                         std::log(problem.rate_gamma[i]) - std::log(direct), row);
      problem.rows.push_back(std::move(row));
    }

    GpRow coupling;
    coupling.kind = GpRow::Kind::kCoupling;
    coupling.link = i;
    std::vector<size_t> active;
    for (size_t k = 0; k < approx.coefficients.size(); ++k) {
      if (approx.coefficients[k] > 0.0) active.push_back(k);
    }
    coupling.exponents = Matrix::Zero(static_cast<Eigen::Index>(active.size()), n);
    coupling.log_coeffs = Vector(static_cast<Eigen::Index>(active.size()));
    for (size_t l = 0; l < active.size(); ++l) {
      const auto li = static_cast<Eigen::Index>(l);
      coupling.exponents(li, problem.rate_var(i)) = approx.exponents[active[l]].value();
      coupling.exponents(li, problem.aux_var(i)) = inv_root;
      coupling.exponents(li, problem.power_var(i)) = -inv_root;
      coupling.log_coeffs[li] = std::log(approx.coefficients[active[l]]) - inv_root * std::log(direct);
    }
    problem.rows.push_back(std::move(coupling));

    GpRow bound;
    bound.kind = GpRow::Kind::kInterference;
    bound.link = i;
    interference_terms(i, problem.aux_var(i), 0.0, bound);
    problem.rows.push_back(std::move(bound));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    GpRow cap;
    cap.kind = GpRow::Kind::kPowerCap;
    cap.link = i;
    cap.exponents = Matrix::Zero(1, n);
    cap.exponents(0, problem.power_var(i)) = 1.0;
    cap.log_coeffs = Vector::Constant(1, -std::log(model.p_max[i]));
    problem.rows.push_back(std::move(cap));
  }
  return problem;
}

std::vector<TightnessResidual> check_tightness(const LatencyResult& result,
                                               const GpProblem& problem, double threshold) {
  const Eigen::Index m = problem.links();
  Vector x(problem.num_vars());
  for (Eigen::Index i = 0; i < m; ++i) {
    x[problem.power_var(i)] = std::log(result.p_star.p[i]);
    x[problem.rate_var(i)] = std::log(result.t_star_nats[i]);
    x[problem.aux_var(i)] = std::log(result.z_star[i]);
  }
  std::vector<TightnessResidual> out(static_cast<size_t>(m));
  for (const GpRow& row : problem.rows) {
    const double slack = -std::expm1(row_value(row, x));
    auto& entry = out[static_cast<size_t>(row.link)];
    if (row.kind == GpRow::Kind::kCoupling) entry.coupling = slack;
    if (row.kind == GpRow::Kind::kInterference) entry.interference = slack;
  }
  for (auto& entry : out) {
    entry.slack = std::abs(entry.coupling) > threshold || std::abs(entry.interference) > threshold;
  }
  return out;
}

LatencyResult solve_gp(const GpProblem& problem, const GpOptions& opts) {
  if (!(opts.duality_tol > 0.0) || !(opts.mu0 > 0.0) || !(opts.mu_factor > 1.0) ||
      opts.max_newton_steps <= 0 || !(opts.ls_alpha > 0.0 && opts.ls_alpha < 0.5) ||
      !(opts.ls_beta > 0.0 && opts.ls_beta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid GP solver options");
  }
  const NetworkModel& model = problem.model;
  const Eigen::Index m = problem.links();
  const Eigen::Index n = problem.num_vars();
  LatencyResult result;
  result.root_order = problem.approx.root_order;

  const Vector p0 = strict_interior_powers(model, problem.rate_gamma);
  if (p0.size() == 0) {
    result.status = LatencyStatus::kInfeasible;
    result.message = "rate floors admit no strictly feasible power vector";
    return result;
  }

  Vector x(n);
  const Vector z0 = interference(model, p0) * (1.0 + kInitialSlack);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double q = std::pow(model.gain(i, i) * p0[i] / z0[i], 1.0 / problem.approx.root_order);
    const double t0 = (1.0 - kInitialSlack) * inverse(problem.approx, q, 1e6);
    x[problem.power_var(i)] = std::log(p0[i]);
    x[problem.rate_var(i)] = std::log(t0);
    x[problem.aux_var(i)] = std::log(z0[i]);
  }

  const Barrier barrier(problem);
  if (!barrier.strictly_feasible(x)) {
    throw Error(ErrorCode::kNumericalFailure, "GP starting point is not strictly feasible");
  }

  const auto num_rows = static_cast<double>(problem.rows.size());
  double tau = 1.0 / opts.mu0;
  bool converged = false;
  Vector grad;
  Matrix hess;
  while (!converged) {
    // Centering.
    double previous_decrement = std::numeric_limits<double>::infinity();
    while (true) {
      if (result.newton_steps >= opts.max_newton_steps) {
        result.status = LatencyStatus::kNonConverged;
        result.message = "Newton step cap reached";
        break;
      }
      barrier.derivatives(x, tau, grad, hess);
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(hess, Eigen::EigenvaluesOnly);
      const double hi = eig.eigenvalues().maxCoeff();
      if (hi > 0.0) {
        result.min_hessian_eig_ratio =
            std::min(result.min_hessian_eig_ratio, eig.eigenvalues().minCoeff() / hi);
      }
      const Eigen::LDLT<Matrix> ldlt(hess);
      Vector step = -ldlt.solve(grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        throw Error(ErrorCode::kNumericalFailure, "Newton system is singular");
      }
      const double decrement = -grad.dot(step);
      ++result.newton_steps;
      if (decrement * 0.5 <= 1e-10) break;
      // At large tau the decrement bottoms out at the round-off level of the
      // barrier gradient; stop once it no longer contracts.
      if (decrement < 1e-6 && decrement > 0.5 * previous_decrement) break;
      previous_decrement = decrement;

      const double phi = barrier.value(x, tau);
      double alpha = 1.0;
      while (!(barrier.value(x + alpha * step, tau) <= phi - opts.ls_alpha * alpha * decrement)) {
        alpha *= opts.ls_beta;
        if (alpha < 1e-12) break;
      }
      if (alpha < 1e-12) break;
      x += alpha * step;
    }
    if (result.status == LatencyStatus::kNonConverged) break;
    result.duality_measure = num_rows / tau;
    if (result.duality_measure <= opts.duality_tol) converged = true;
    else tau *= opts.mu_factor;
  }

  result.kkt_residual = barrier.kkt_residual(x, tau);
  result.p_star.p = x.segment(0, m).array().exp();
  result.t_star_nats = x.segment(m, m).array().exp();
  result.z_star = x.segment(2 * m, m).array().exp();
  // Round-off can put p a hair above its cap.
  result.p_star.p = result.p_star.p.cwiseMin(model.p_max);
  const LinkMetrics metrics = capacity(model, result.p_star);
  result.rates_bits = metrics.capacity_bits;
  result.rates_nats = metrics.capacity_nats;
  result.objective = model.weights.cwiseQuotient(result.t_star_nats).sum();
  result.objective_bits = weighted_latency(model, result.p_star);
  result.objective_nats = weighted_latency_nats(model, result.p_star);
  result.tightness = check_tightness(result, problem);
  if (converged) result.status = LatencyStatus::kOptimal;
  return result;
}

int adaptive_root_order(const NetworkModel& model, const SolverOptions& opts) {
  validate(model);
  if (!model.min_rates) {
    throw Error(ErrorCode::kMissingRates, "adaptive root order needs min_rates");
  }
  const ConstraintRows region = threshold_rows(model, rate_floor_gamma(*model.min_rates));
  int order = 2;
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    const double best = max_sinr(model, i, region, opts).lambda_star;
    order = std::max(order, static_cast<int>(std::ceil(model.weights[i] * std::log1p(best))));
  }
  return order;
}

LatencyResult solve_latency(const NetworkModel& model, const LatencyOptions& opts) {
  validate(model);
  if (!model.min_rates) {
    throw Error(ErrorCode::kMissingRates, "latency minimization needs min_rates");
  }
  if (!feasible(model, rate_floor_gamma(*model.min_rates))) {
    LatencyResult result;
    result.status = LatencyStatus::kInfeasible;
    result.message = "rate floors are infeasible within the power caps";
    return result;
  }
  const int order =
      opts.adaptive_root_order ? adaptive_root_order(model, opts.dinkelbach) : opts.root_order;
  const auto [approx, report] = fit(order, {0.0, static_cast<double>(order)}, opts.fit_mode);
  return solve_gp(build_gp(model, approx), opts.gp);
}

}  // namespace powcap
