#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "powcap/model.hpp"

namespace powcap {

/// Exact positive rational exponent num/den in lowest terms.
struct Rational {
  long num = 0;
  long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational make_rational(long num, long den);

enum class ExponentMode {
  kPuiseux,  ///< {1/T, 1 + 1/T, 2 + 1/T, 3 + 1/T}
  kFull,     ///< {1/T, 2/T, ..., (T-1)/T, 1, 2}
};

std::string_view to_string(ExponentMode mode);
ExponentMode parse_exponent_mode(std::string_view text);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// sum_k c_k x^{d_k}, a surrogate for (e^x - 1)^{1/T} on `domain`.
struct PosynomialApprox {
  int root_order = 20;
  std::vector<Rational> exponents;
  std::vector<double> coefficients;
  Interval domain{0.0, 20.0};

  std::vector<double> exponent_values() const;
};

struct ErrorSample {
  double x = 0.0;
  double rel_error_pct = 0.0;
};

struct FitReport {
  /// Integral of (posynomial - target)^2 over the domain.
  double l2_error = 0.0;
  double max_rel_error_pct = 0.0;
  std::vector<ErrorSample> grid;
  /// KKT residual of the coefficient QP at the returned coefficients.
  double kkt_residual = 0.0;
};

std::vector<Rational> exponent_grid(int root_order, ExponentMode mode = ExponentMode::kPuiseux);

/// H(i,j) = integral over domain of x^{d_i + d_j}, in closed form.
Matrix gram_moments(std::span<const double> exponents, Interval domain);

/// b_i = -2 * integral over domain of (e^x - 1)^{1/T} x^{d_i}, by adaptive
/// Simpson to 1e-10 absolute. `error_estimate`, when given, receives the
/// per-entry quadrature error estimates.
Vector target_moments(std::span<const double> exponents, Interval domain, int root_order,
                      Vector* error_estimate = nullptr, double abs_tol = 1e-10);

struct NnlsResult {
  Vector c;
  /// max_k max(-g_k, |c_k g_k|) with g = 2 A c + b.
  double kkt_residual = 0.0;
  int iterations = 0;
  bool used_projected_gradient = false;
};

/// min_{c >= 0} c^T A c + b^T c for symmetric positive semidefinite A.
/// Lawson-Hanson active set in extended precision, projected gradient when
/// a passive-set block is not numerically positive definite.
NnlsResult nnls_qp(const Matrix& a, const Vector& b);

/// (e^x - 1)^{1/T}.
double target_function(double x, int root_order);

double eval(const PosynomialApprox& approx, double x);

/// Smallest x >= 0 with eval(approx, x) >= y (bisection; the posynomial is
/// increasing). Saturates at `x_cap`.
double inverse(const PosynomialApprox& approx, double y, double x_cap);

std::vector<double> geometric_grid(double lo, double hi, int points);

/// Relative error in percent at every grid point; l2_error is left at 0.
FitReport error_profile(const PosynomialApprox& approx, std::span<const double> grid);

/// Integral squared error of the posynomial over its domain (quadrature).
double l2_error(const PosynomialApprox& approx);

std::pair<PosynomialApprox, FitReport> fit(int root_order, Interval domain,
                                           ExponentMode mode = ExponentMode::kPuiseux);

}  // namespace powcap
