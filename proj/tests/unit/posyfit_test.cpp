#include "powcap/posyfit.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "powcap/error.hpp"

namespace powcap {
namespace {

// Least-squares optimum for exponents {1,21,41,61}/20 on [0,20], computed
// independently with 40-digit arithmetic (mpmath quadrature and LU solve).
constexpr double kReferenceCoefficients[] = {0.995330228194423, 0.0292105323601672,
                                             0.00171933078007779, 8.75535047859861e-6};
constexpr double kReferenceL2 = 3.47199295705273e-5;
constexpr double kBaselineL2 = 5.95226232998477e-5;

PosynomialApprox baseline_approx() {
  PosynomialApprox a;
  a.root_order = 20;
  a.exponents = exponent_grid(20);
  a.coefficients = {9.959e-1, 2.859e-2, 1.817e-3, 4.874e-6};
  a.domain = {0.0, 20.0};
  return a;
}

TEST(ExponentGrid, PuiseuxAndFullSets) {
  const auto puiseux = exponent_grid(20, ExponentMode::kPuiseux);
  ASSERT_EQ(puiseux.size(), 4u);
  EXPECT_EQ(puiseux[0], (Rational{1, 20}));
  EXPECT_EQ(puiseux[1], (Rational{21, 20}));
  EXPECT_EQ(puiseux[2], (Rational{41, 20}));
  EXPECT_EQ(puiseux[3], (Rational{61, 20}));

  const auto small = exponent_grid(2, ExponentMode::kFull);
  ASSERT_EQ(small.size(), 3u);
  EXPECT_EQ(small[0], (Rational{1, 2}));
  EXPECT_EQ(small[1], (Rational{1, 1}));
  EXPECT_EQ(small[2], (Rational{2, 1}));

  const auto full = exponent_grid(20, ExponentMode::kFull);
  ASSERT_EQ(full.size(), 21u);
  EXPECT_EQ(full[18], (Rational{19, 20}));
  EXPECT_EQ(full[19], (Rational{1, 1}));
  EXPECT_EQ(full[20], (Rational{2, 1}));
  EXPECT_EQ(full[9], (Rational{1, 2}));  // 10/20 reduced

  EXPECT_THROW(exponent_grid(0), Error);
}

TEST(GramMoments, ClosedFormEntries) {
  const double one[] = {1.0};
  EXPECT_NEAR(gram_moments(one, {0.0, 1.0})(0, 0), 1.0 / 3.0, 1e-15);

  const double hilbert[] = {0.0, 1.0};
  const Matrix h = gram_moments(hilbert, {0.0, 1.0});
  EXPECT_NEAR(h(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(h(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(h(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(h(1, 1), 1.0 / 3.0, 1e-15);

  const double d[] = {0.05, 1.05};
  EXPECT_NEAR(gram_moments(d, {0.0, 20.0})(0, 0), std::pow(20.0, 1.1) / 1.1, 1e-12);
}

TEST(GramMoments, SymmetricPositiveDefinite) {
  for (ExponentMode mode : {ExponentMode::kPuiseux, ExponentMode::kFull}) {
    for (int t : {2, 5, 20}) {
      PosynomialApprox a;
      a.exponents = exponent_grid(t, mode);
      const Matrix h = gram_moments(a.exponent_values(), {0.0, static_cast<double>(t)});
      EXPECT_TRUE(h.isApprox(h.transpose()));
      // Cholesky succeeds only on a positive definite matrix; scale to unit diagonal first.
      const Vector s = h.diagonal().cwiseSqrt().cwiseInverse();
      const Matrix scaled = s.asDiagonal() * h * s.asDiagonal();
      if (mode == ExponentMode::kPuiseux) {
        EXPECT_EQ(Eigen::LLT<Matrix>(scaled).info(), Eigen::Success) << t;
      }
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(scaled).eigenvalues().minCoeff(), -1e-12);
    }
  }
}

TEST(TargetMoments, ClosedFormCases) {
  const double zero[] = {0.0};
  EXPECT_NEAR(target_moments(zero, {0.0, 1.0}, 1)[0], -2.0 * (std::numbers::e - 2.0), 1e-10);
  const double one[] = {1.0};
  EXPECT_NEAR(target_moments(one, {0.0, 1.0}, 1)[0], -1.0, 1e-10);
}

TEST(TargetMoments, BoundedByExponentialMajorant) {
  const double d[] = {0.05};
  const double b = target_moments(d, {0.0, 20.0}, 20)[0];
  // (e^x - 1)^{1/20} < e^{x/20}: integrate the majorant x^{0.05} e^{x/20} separately.
  const double majorant = 2.0 * [] {
    double sum = 0.0;
    const int n = 2'000'000;
    for (int k = 0; k < n; ++k) {
      const double x = 20.0 * (k + 0.5) / n;
      sum += std::pow(x, 0.05) * std::exp(x / 20.0);
    }
    return sum * 20.0 / n;
  }();
  EXPECT_LT(b, 0.0);
  EXPECT_LT(std::abs(b), majorant);
}

TEST(TargetMoments, HalvingToleranceStaysWithinEstimate) {
  PosynomialApprox a;
  a.exponents = exponent_grid(20);
  const auto d = a.exponent_values();
  Vector err;
  const Vector coarse = target_moments(d, {0.0, 20.0}, 20, &err, 1e-10);
  const Vector fine = target_moments(d, {0.0, 20.0}, 20, nullptr, 5e-11);
  for (Eigen::Index i = 0; i < coarse.size(); ++i) {
    EXPECT_LE(std::abs(coarse[i] - fine[i]), std::max(err[i], 1e-10)) << i;
  }
}

TEST(NnlsQp, ScalarAndSeparableCases) {
  EXPECT_NEAR(nnls_qp(Matrix::Constant(1, 1, 1.0), Vector::Constant(1, -2.0)).c[0], 1.0, 1e-14);
  EXPECT_EQ(nnls_qp(Matrix::Constant(1, 1, 1.0), Vector::Constant(1, 2.0)).c[0], 0.0);
  Vector b(2);
  b << -2.0, 4.0;
  const NnlsResult r = nnls_qp(Matrix::Identity(2, 2), b);
  EXPECT_NEAR(r.c[0], 1.0, 1e-14);
  EXPECT_EQ(r.c[1], 0.0);
  EXPECT_LE(r.kkt_residual, 1e-10);
}

TEST(NnlsQp, KktCertifiedOnRandomPsdProblems) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 6;
    const Matrix f = Matrix::NullaryExpr(k + 2, k, [&] { return n(rng); });
    const Matrix a = f.transpose() * f;
    const Vector b = Vector::NullaryExpr(k, [&] { return 3.0 * n(rng); });
    const NnlsResult r = nnls_qp(a, b);
    ASSERT_TRUE((r.c.array() >= 0.0).all());
    const Vector g = 2.0 * a * r.c + b;
    for (int i = 0; i < k; ++i) {
      EXPECT_GE(g[i], -1e-10);
      EXPECT_LE(r.c[i] * g[i], 1e-10);
    }
    EXPECT_LE(r.kkt_residual, 1e-10);
  }
}

TEST(NnlsQp, RejectsNonSymmetricInput) {
  Matrix a(2, 2);
  a << 1.0, 2.0, 0.0, 1.0;
  EXPECT_THROW(nnls_qp(a, Vector::Zero(2)), Error);
  EXPECT_THROW(nnls_qp(Matrix::Identity(2, 2), Vector::Zero(3)), Error);
}

TEST(Fit, PuiseuxMatchesHighPrecisionReference) {
  const auto [approx, report] = fit(20, {0.0, 20.0}, ExponentMode::kPuiseux);
  ASSERT_EQ(approx.coefficients.size(), 4u);
  for (size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(approx.coefficients[k], kReferenceCoefficients[k],
                1e-6 * kReferenceCoefficients[k])
        << k;
  }
  EXPECT_NEAR(report.l2_error, kReferenceL2, 1e-9);
  EXPECT_LE(report.kkt_residual, 1e-10);
  EXPECT_EQ(report.grid.size(), 2000u);
  EXPECT_DOUBLE_EQ(report.grid.front().x, 1e-2);
  EXPECT_DOUBLE_EQ(report.grid.back().x, 20.0);
  EXPECT_LE(report.max_rel_error_pct, 2.0);
}

TEST(Fit, DominatesBaselineCoefficients) {
  const auto [approx, report] = fit(20, {0.0, 20.0});
  const double baseline = l2_error(baseline_approx());
  EXPECT_NEAR(baseline, kBaselineL2, 1e-9);
  EXPECT_LE(report.l2_error, baseline);
}

TEST(Fit, DominatesRandomNonnegativePerturbations) {
  const auto [approx, report] = fit(20, {0.0, 20.0});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  for (int trial = 0; trial < 20; ++trial) {
    PosynomialApprox other = approx;
    for (double& c : other.coefficients) c *= u(rng);
    EXPECT_LE(report.l2_error, l2_error(other) + 1e-12);
  }
}

TEST(Fit, NestedModelsOnUnitInterval) {
  // T = 1, full grid {1, 2}: best fit of e^x - 1 by c1 x + c2 x^2 beats c1 x alone.
  const auto [two_terms, two_report] = fit(1, {0.0, 1.0}, ExponentMode::kFull);
  ASSERT_EQ(two_terms.exponents.size(), 2u);
  PosynomialApprox linear;
  linear.root_order = 1;
  linear.domain = {0.0, 1.0};
  linear.exponents = {{1, 1}};
  const double one[] = {1.0};
  const NnlsResult c = nnls_qp(gram_moments(one, {0.0, 1.0}), target_moments(one, {0.0, 1.0}, 1));
  linear.coefficients = {c.c[0]};
  EXPECT_LT(two_report.l2_error, l2_error(linear));
}

TEST(Fit, FullGridStillNonnegative) {
  const auto [approx, report] = fit(20, {0.0, 20.0}, ExponentMode::kFull);
  ASSERT_EQ(approx.coefficients.size(), 21u);
  for (double c : approx.coefficients) EXPECT_GE(c, 0.0);
  EXPECT_LE(report.max_rel_error_pct, 2.0);
}

TEST(Eval, ZeroMonotoneAndBaselineValueAtTwenty) {
  const PosynomialApprox a = baseline_approx();
  EXPECT_EQ(eval(a, 0.0), 0.0);
  EXPECT_NEAR(eval(a, 20.0), 2.710552454, 1e-8);
  const double truth = target_function(20.0, 20);
  EXPECT_NEAR(truth, 2.718281828, 1e-8);
  EXPECT_NEAR(100.0 * std::abs(eval(a, 20.0) - truth) / truth, 0.2843, 1e-3);
  double previous = 0.0;
  for (double x = 0.01; x < 30.0; x += 0.01) {
    const double v = eval(a, x);
    EXPECT_GT(v, previous);
    previous = v;
  }
}

TEST(ErrorProfile, BaselineCoefficientsStayWithinTwoPercent) {
  const FitReport r = error_profile(baseline_approx(), geometric_grid(0.1, 20.0, 2000));
  EXPECT_NEAR(r.max_rel_error_pct, 0.37374, 1e-4);
  EXPECT_LE(r.max_rel_error_pct, 2.0);
}

TEST(Inverse, RecoversEvaluatedPoints) {
  const PosynomialApprox a = baseline_approx();
  for (double x : {0.001, 0.5, 3.0, 19.5}) {
    EXPECT_NEAR(inverse(a, eval(a, x), 1e3), x, 1e-12 * (1.0 + x));
  }
  EXPECT_EQ(inverse(a, 0.0, 10.0), 0.0);
}

}  // namespace
}  // namespace powcap
