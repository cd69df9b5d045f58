#include "powcap/posyfit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "powcap/error.hpp"
#include "powcap/quadrature.hpp"

namespace powcap {

namespace {

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

constexpr double kFitTolerance = 1e-10;
constexpr int kProfilePoints = 2000;
constexpr double kProfileStart = 1e-2;

void check_domain(Interval domain) {
  if (!(domain.lo >= 0.0) || !(domain.hi > domain.lo) || !std::isfinite(domain.hi)) {
    throw Error(ErrorCode::kInvalidArgument, "fit domain must satisfy 0 <= lo < hi");
  }
}

void check_root_order(int root_order) {
  if (root_order < 1) throw Error(ErrorCode::kInvalidArgument, "root order must be >= 1");
}

long double kkt_of(const LongMatrix& a, const LongVector& b, const LongVector& c) {
  const LongVector g = 2.0L * (a * c) + b;
  long double worst = 0.0L;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    worst = std::max({worst, -g[k], std::abs(c[k] * g[k])});
  }
  return worst;
}

// Projected gradient with Nesterov momentum on the scaled problem.
LongVector projected_gradient(const LongMatrix& a, const LongVector& b, LongVector c,
                              int& iterations) {
  const long double lipschitz =
      2.0L * Eigen::SelfAdjointEigenSolver<LongMatrix>(a, Eigen::EigenvaluesOnly)
                 .eigenvalues()
                 .maxCoeff();
  if (!(lipschitz > 0.0L)) return LongVector::Zero(c.size());
  LongVector y = c;
  long double momentum = 1.0L;
  for (int iter = 0; iter < 200000; ++iter) {
    ++iterations;
    const LongVector g = 2.0L * (a * y) + b;
    const LongVector next = (y - g / lipschitz).cwiseMax(0.0L);
    const long double next_momentum = 0.5L * (1.0L + std::sqrt(1.0L + 4.0L * momentum * momentum));
    y = next + ((momentum - 1.0L) / next_momentum) * (next - c);
    c = next;
    momentum = next_momentum;
    if (iter % 100 == 0 && kkt_of(a, b, c) <= 1e-14L) break;
  }
  return c;
}

}  // namespace

Rational make_rational(long num, long den) {
  if (den <= 0) throw Error(ErrorCode::kInvalidArgument, "rational denominator must be > 0");
  const long g = std::gcd(num, den);
  return {num / g, den / g};
}

std::string_view to_string(ExponentMode mode) {
  return mode == ExponentMode::kFull ? "full" : "puiseux";
}

ExponentMode parse_exponent_mode(std::string_view text) {
  if (text == "puiseux") return ExponentMode::kPuiseux;
  if (text == "full") return ExponentMode::kFull;
  throw Error(ErrorCode::kInvalidArgument,
              "fit mode must be 'puiseux' or 'full', got '" + std::string(text) + "'");
}

std::vector<double> PosynomialApprox::exponent_values() const {
  std::vector<double> out;
  out.reserve(exponents.size());
  for (const Rational& r : exponents) out.push_back(r.value());
  return out;
}

std::vector<Rational> exponent_grid(int root_order, ExponentMode mode) {
  check_root_order(root_order);
  const long t = root_order;
  std::vector<Rational> out;
  if (mode == ExponentMode::kPuiseux) {
    for (long k = 0; k < 4; ++k) out.push_back(make_rational(k * t + 1, t));
  } else {
    for (long k = 1; k < t; ++k) out.push_back(make_rational(k, t));
    out.push_back({1, 1});
    out.push_back({2, 1});
  }
  return out;
}

Matrix gram_moments(std::span<const double> exponents, Interval domain) {
  check_domain(domain);
  const auto k = static_cast<Eigen::Index>(exponents.size());
  Matrix h(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double power = exponents[static_cast<size_t>(i)] + exponents[static_cast<size_t>(j)] + 1.0;
      h(i, j) = (std::pow(domain.hi, power) - std::pow(domain.lo, power)) / power;
      h(j, i) = h(i, j);
    }
  }
  return h;
}

double target_function(double x, int root_order) {
  return std::pow(std::expm1(x), 1.0 / root_order);
}

Vector target_moments(std::span<const double> exponents, Interval domain, int root_order,
                      Vector* error_estimate, double abs_tol) {
  check_domain(domain);
  check_root_order(root_order);
  const auto k = static_cast<Eigen::Index>(exponents.size());
  Vector b(k);
  if (error_estimate) error_estimate->resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double d = exponents[static_cast<size_t>(i)];
    const QuadratureResult q = adaptive_simpson(
        [&](double x) { return target_function(x, root_order) * std::pow(x, d); }, domain.lo,
        domain.hi, abs_tol);
    b[i] = -2.0 * q.value;
    if (error_estimate) (*error_estimate)[i] = 2.0 * q.error_estimate;
  }
  return b;
}

NnlsResult nnls_qp(const Matrix& a_in, const Vector& b_in) {
  const Eigen::Index n = b_in.size();
  if (a_in.rows() != n || a_in.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "nnls_qp: A must be square and match b");
  }
  if (!a_in.isApprox(a_in.transpose(), 1e-12)) {
    throw Error(ErrorCode::kInvalidArgument, "nnls_qp: A must be symmetric");
  }
  NnlsResult out;
  if (n == 0) return out;

  const LongMatrix a_full = a_in.cast<long double>();
  const LongVector b_full = b_in.cast<long double>();

  // Jacobi scaling c = D^{-1/2} s keeps the cone and tames the Gram spread.
  LongVector scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    scale[i] = a_full(i, i) > 0.0L ? 1.0L / std::sqrt(a_full(i, i)) : 1.0L;
  }
  const LongMatrix a = scale.asDiagonal() * a_full * scale.asDiagonal();
  const LongVector b = scale.cwiseProduct(b_full);

  constexpr long double kEnterTol = 1e-15L;
  std::vector<bool> passive(static_cast<size_t>(n), false);
  LongVector s = LongVector::Zero(n);
  bool degenerate = false;

  auto solve_passive = [&](LongVector& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (passive[static_cast<size_t>(i)]) idx.push_back(i);
    }
    const auto p = static_cast<Eigen::Index>(idx.size());
    LongMatrix app(p, p);
    LongVector bp(p);
    for (Eigen::Index r = 0; r < p; ++r) {
      bp[r] = b[idx[static_cast<size_t>(r)]];
      for (Eigen::Index c = 0; c < p; ++c) {
        app(r, c) = a(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
      }
    }
    Eigen::LLT<LongMatrix> llt(app);
    if (llt.info() != Eigen::Success) return false;
    LongVector zp = llt.solve(-0.5L * bp);
    // Two rounds of iterative refinement.
    for (int round = 0; round < 2; ++round) {
      const LongVector r = -0.5L * bp - app * zp;
      zp += llt.solve(r);
    }
    z = LongVector::Zero(n);
    for (Eigen::Index r = 0; r < p; ++r) z[idx[static_cast<size_t>(r)]] = zp[r];
    return true;
  };

  const int max_outer = static_cast<int>(3 * n + 10);
  for (int outer = 0; outer < max_outer; ++outer) {
    const LongVector g = 2.0L * (a * s) + b;
    Eigen::Index enter = -1;
    long double most_negative = -kEnterTol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!passive[static_cast<size_t>(i)] && g[i] < most_negative) {
        most_negative = g[i];
        enter = i;
      }
    }
    if (enter < 0) break;
    passive[static_cast<size_t>(enter)] = true;
    ++out.iterations;

    while (true) {
      LongVector z;
      if (!solve_passive(z)) {
        degenerate = true;
        break;
      }
      bool all_positive = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<size_t>(i)] && z[i] <= 0.0L) all_positive = false;
      }
      if (all_positive) {
        s = z;
        break;
      }
      long double alpha = 1.0L;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<size_t>(i)] && z[i] <= 0.0L) {
          alpha = std::min(alpha, s[i] / (s[i] - z[i]));
        }
      }
      s += alpha * (z - s);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<size_t>(i)] && s[i] <= 1e-300L) {
          passive[static_cast<size_t>(i)] = false;
          s[i] = 0.0L;
        }
      }
      ++out.iterations;
    }
    if (degenerate) break;
  }

  if (degenerate || kkt_of(a, b, s) > 1e-14L) {
    out.used_projected_gradient = true;
    s = projected_gradient(a, b, s.cwiseMax(0.0L), out.iterations);
  }

  out.c = scale.cwiseProduct(s).cast<double>();
  out.kkt_residual = static_cast<double>(kkt_of(a_full, b_full, out.c.cast<long double>()));
  return out;
}

double eval(const PosynomialApprox& approx, double x) {
  double sum = 0.0;
  for (size_t k = 0; k < approx.coefficients.size(); ++k) {
    sum += approx.coefficients[k] * std::pow(x, approx.exponents[k].value());
  }
  return sum;
}

double inverse(const PosynomialApprox& approx, double y, double x_cap) {
  if (y <= 0.0) return 0.0;
  if (eval(approx, x_cap) <= y) return x_cap;
  double lo = 0.0;
  double hi = x_cap;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (eval(approx, mid) < y ? lo : hi) = mid;
  }
  return hi;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "geometric grid needs 0 < lo < hi and >= 2 points");
  }
  std::vector<double> grid(static_cast<size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[static_cast<size_t>(i)] = lo * std::exp(step * i);
  grid.back() = hi;
  return grid;
}

FitReport error_profile(const PosynomialApprox& approx, std::span<const double> grid) {
  FitReport report;
  report.grid.reserve(grid.size());
  for (double x : grid) {
    const double truth = target_function(x, approx.root_order);
    const double pct = 100.0 * std::abs(eval(approx, x) - truth) / truth;
    report.grid.push_back({x, pct});
    report.max_rel_error_pct = std::max(report.max_rel_error_pct, pct);
  }
  return report;
}

double l2_error(const PosynomialApprox& approx) {
  const auto sq = [&](double x) {
    const double r = eval(approx, x) - target_function(x, approx.root_order);
    return r * r;
  };
  return adaptive_simpson(sq, approx.domain.lo, approx.domain.hi, 1e-12).value;
}

std::pair<PosynomialApprox, FitReport> fit(int root_order, Interval domain, ExponentMode mode) {
  check_root_order(root_order);
  check_domain(domain);
  PosynomialApprox approx;
  approx.root_order = root_order;
  approx.domain = domain;
  approx.exponents = exponent_grid(root_order, mode);
  const std::vector<double> d = approx.exponent_values();

  const Matrix h = gram_moments(d, domain);
  const Vector b = target_moments(d, domain, root_order, nullptr, kFitTolerance);
  const NnlsResult qp = nnls_qp(h, b);
  approx.coefficients.assign(qp.c.data(), qp.c.data() + qp.c.size());

  const double start = std::max(domain.lo, kProfileStart);
  FitReport report = error_profile(approx, geometric_grid(start, domain.hi, kProfilePoints));
  report.l2_error = l2_error(approx);
  report.kkt_residual = qp.kkt_residual;
  return {std::move(approx), std::move(report)};
}

}  // namespace powcap
