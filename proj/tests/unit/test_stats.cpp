#include "doctest.h"

#include <cmath>

#include "ark/error.hpp"
#include "ark/knockoffs.hpp"
#include "ark/stats.hpp"
#include "test_helpers.hpp"

using namespace ark;

namespace {

LassoOptions tight() {
  LassoOptions o;
  o.tol = 1e-13;
  o.kkt_tol = 1e-10;
  return o;
}

/// Least squares with intercept via the normal equations.
Vector ols_slopes(const Matrix& x, const Vector& y) {
  Matrix a(x.rows(), x.cols() + 1);
  a << Matrix::Ones(x.rows(), 1), x;
  const Vector coef = (a.transpose() * a).ldlt().solve(a.transpose() * y);
  return coef.tail(x.cols());
}

}  // namespace

TEST_CASE("marginal statistic on a two-row example") {
  Matrix x(2, 1), xh(2, 1);
  x << 1, 0;
  xh << 0, 1;
  Vector y(2);
  y << 1, 0;
  const StatVector s = marginal_corr_stats(x, xh, y);
  // (sqrt(2) * 1)^{-1} (|1| - |0|)
  CHECK(s.w(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("marginal statistic: identical columns, swaps, scaling, zero response") {
  const Matrix x = test::random_matrix(30, 4, 1);
  const Matrix xh = test::random_matrix(30, 4, 2);
  const Vector y = test::random_matrix(30, 1, 3).col(0);
  CHECK(marginal_corr_stats(x, x, y).w.cwiseAbs().maxCoeff() == 0.0);

  const Vector w = marginal_corr_stats(x, xh, y).w;
  const Vector w_swapped = marginal_corr_stats(xh, x, y).w;
  CHECK((w + w_swapped).cwiseAbs().maxCoeff() == 0.0);

  const Vector w_scaled = marginal_corr_stats(x, xh, 7.5 * y).w;
  CHECK((w - w_scaled).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_WITH_AS(marginal_corr_stats(x, xh, Vector::Zero(30)), doctest::Contains("zero"), Error);
}

TEST_CASE("rcd statistic") {
  Vector b(4);
  b << 3, -2, 1, 1;
  const Vector w = rcd_stats(b).w;
  REQUIRE(w.size() == 2);
  CHECK(w(0) == 2.0);
  CHECK(w(1) == 1.0);

  Vector same(4);
  same << 0.5, -1, -0.5, 1;
  CHECK(rcd_stats(same).w.cwiseAbs().maxCoeff() == 0.0);

  Vector flipped(4);
  flipped << 1, 1, 3, -2;
  CHECK((rcd_stats(flipped).w + w).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(rcd_stats(Vector::Ones(3)), Error);
}

TEST_CASE("swapped design exchanges a column with its knockoff") {
  const Matrix x = test::random_matrix(10, 3, 4);
  const Matrix xh = test::random_matrix(10, 3, 5);
  const AugmentedDesign d = AugmentedDesign::from(x, xh).swapped(1);
  CHECK(d.cols.col(1) == xh.col(1));
  CHECK(d.cols.col(4) == x.col(1));
  CHECK(d.cols.col(0) == x.col(0));
}

TEST_CASE("nodewise score with orthogonal columns is the column itself") {
  // columns of a scaled Hadamard matrix are mutually orthogonal
  Matrix h(4, 4);
  h << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  AugmentedDesign d;
  d.cols = h;
  for (Eigen::Index j = 0; j < 4; ++j) {
    const NodewiseScore s = nodewise_score(d, j, 0.1);
    CHECK(s.gamma.cwiseAbs().maxCoeff() == 0.0);
    CHECK((s.z - h.col(j)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("duplicated column with zero penalty is degenerate") {
  Matrix x = test::random_matrix(40, 3, 6);
  Matrix xh = test::random_matrix(40, 3, 7);
  xh.col(2) = x.col(0);
  const AugmentedDesign d = AugmentedDesign::from(x, xh);
  try {
    (void)nodewise_score(d, 0, 0.0);
    FAIL("expected DegenerateScore");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateScore);
    REQUIRE(e.index().has_value());
    CHECK(*e.index() == 0);
  }
}

TEST_CASE("nodewise score satisfies the KKT bound on an AR(0.5) design") {
  const Matrix x = sample_gaussian(200, build_ar_covariance(10, 0.5), 8);
  AugmentedDesign d;
  d.cols = x;
  const double lambda_j = lambda_rate(200, 5);
  const double n = 200.0;
  for (Eigen::Index j = 0; j < 10; ++j) {
    const NodewiseScore s = nodewise_score(d, j, lambda_j);
    for (Eigen::Index k = 0; k < 10; ++k) {
      if (k == j) continue;
      CHECK(std::abs(s.z.dot(x.col(k)) / n) <= lambda_j + 1e-6);
    }
  }
}

TEST_CASE("debiased Lasso with one column is OLS") {
  const Matrix x = 2.0 * test::random_matrix(50, 1, 9).array() + 1.0;
  const Vector y = (3.0 * x.col(0)).array() + test::random_matrix(50, 1, 10).col(0).array();
  AugmentedDesign d;
  d.cols = x;
  const double ols = ols_slopes(x, y)(0);
  for (double lambda : {0.0, 0.1, 1.0, 10.0}) {
    const DebiasedFit fit = debiased_lasso(d, y, lambda, 0.3, tight());
    CHECK(fit.coef(0) == doctest::Approx(ols).epsilon(1e-9));
  }
}

TEST_CASE("debiased Lasso at zero penalty on a square design is OLS") {
  const Matrix x = test::random_matrix(60, 8, 11);
  const Vector y = x * Vector::LinSpaced(8, -1, 1) + test::random_matrix(60, 1, 12).col(0);
  AugmentedDesign d;
  d.cols = x;
  const DebiasedFit fit = debiased_lasso(d, y, 0.0, 0.05, tight());
  const Vector ols = ols_slopes(x, y);
  CHECK((fit.coef - ols).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((fit.init - ols).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("debiasing removes shrinkage on a banded design") {
  const Eigen::Index n = 400, p = 50;
  const SymMatrix sigma = sym_inverse(build_banded_precision(p, 0.2, 10));
  double lasso_err = 0.0, debiased_err = 0.0, lasso_null = 0.0, debiased_null = 0.0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const GroundTruth truth = make_truth(p, 10, 3.0, 100 + rep);
    const Matrix x = sample_gaussian(n, sigma, 200 + rep);
    const Vector y = sample_response(x, truth, Family::linear, 300 + rep);
    AugmentedDesign d;
    d.cols = x;
    const double lambda = std::sqrt(2.0 * std::log(2.0 * p) / n);
    const DebiasedFit fit = debiased_lasso(d, y, lambda, lambda_rate(n, p / 2));
    for (Eigen::Index j : truth.support) {
      lasso_err += std::abs(fit.init(j) - truth.beta(j));
      debiased_err += std::abs(fit.coef(j) - truth.beta(j));
    }
    for (Eigen::Index j : truth.nulls) {
      lasso_null += fit.init(j);
      debiased_null += fit.coef(j);
    }
  }
  CHECK(debiased_err < 0.5 * lasso_err);
  // nulls stay centred after the correction
  CHECK(std::abs(debiased_null) / (10.0 * 40.0) < 0.02);
  CHECK(std::abs(lasso_null) / (10.0 * 40.0) < 0.02);
}

TEST_CASE("GLM route with squared loss reproduces the linear debiased fit") {
  const Matrix x = test::random_matrix(80, 6, 13);
  const Matrix xh = test::random_matrix(80, 6, 14);
  const AugmentedDesign d = AugmentedDesign::from(x, xh);
  Vector beta = Vector::Zero(6);
  beta(0) = 1.5;
  beta(3) = -1.0;
  const Vector y = (x * beta).array() + 0.5 + test::random_matrix(80, 1, 15).col(0).array();
  const DebiasedFit lin = debiased_lasso(d, y, 0.1, 0.2, tight());
  const DebiasedFit glm = glm_debiased(d, y, 0.1, 0.2, Family::linear, tight());
  CHECK((lin.init - glm.init).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((lin.coef - glm.coef).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("logistic weights lie in (0, 1/4]") {
  const Vector eta = Vector::LinSpaced(601, -30.0, 30.0);
  const Vector y = (eta.array() > 0.0).cast<double>();
  const GlmTerms t = glm_terms(eta, y, Family::logistic);
  CHECK(t.weight.minCoeff() > 0.0);
  CHECK(t.weight.maxCoeff() <= 0.25);
  CHECK(t.weight(300) == 0.25);
  // rho_dot = p - y
  CHECK(t.rho_dot(300) == doctest::Approx(0.5));
  CHECK(t.rho_dot(0) == doctest::Approx(1.0 / (1.0 + std::exp(30.0))).epsilon(1e-10));

  const GlmTerms sq = glm_terms(eta, y, Family::linear);
  CHECK(sq.weight.minCoeff() == 1.0);
  CHECK((sq.rho_dot - (eta - y)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("GLM debiased coefficients are centred under the logistic null") {
  const Eigen::Index n = 500, p = 10, reps = 200;
  const GroundTruth null = GroundTruth::from_beta(Vector::Zero(2 * p));
  Matrix coef(reps, 2 * p);
  for (Eigen::Index r = 0; r < reps; ++r) {
    const Matrix x = standard_normal_matrix(n, 2 * p, 1000 + static_cast<std::uint64_t>(r));
    const Vector y = sample_response(x, null, Family::logistic, 5000 + static_cast<std::uint64_t>(r));
    AugmentedDesign d;
    d.cols = x;
    const double rate = lambda_rate(n, p);
    coef.row(r) = glm_debiased(d, y, 0.5 * rate, rate).coef.transpose();
  }
  const Vector mean = coef.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < 2 * p; ++j) {
    const double sd = std::sqrt((coef.col(j).array() - mean(j)).square().sum() / (reps - 1));
    CHECK(std::abs(mean(j)) <= 3.0 * sd / std::sqrt(static_cast<double>(reps)));
  }
}

TEST_CASE("logistic GLM route throws DegenerateTau on duplicated columns") {
  Matrix x = test::random_matrix(100, 3, 16);
  Matrix xh = test::random_matrix(100, 3, 17);
  xh.col(1) = x.col(1);
  const Vector y = (x.col(0).array() > 0.0).cast<double>();
  try {
    (void)glm_debiased(AugmentedDesign::from(x, xh), y, 0.05, 0.0);
    FAIL("expected DegenerateTau");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateTau);
  }
}

TEST_CASE("noise level estimate") {
  SUBCASE("low dimension") {
    const Matrix x = test::random_matrix(200, 20, 18);
    const GroundTruth truth = make_truth(20, 5, 2.0, 19);
    const Vector y = 2.0 * sample_response(x, truth, Family::linear, 20);
    CHECK(estimate_noise_sd(x, y).sigma == doctest::Approx(2.0).epsilon(0.15));
  }
  SUBCASE("knockoff-augmented design with more columns than rows") {
    const SymMatrix sigma = sym_inverse(build_banded_precision(400, 0.2, 10));
    const Matrix x = sample_gaussian(250, sigma, 21);
    const GroundTruth truth = make_truth(400, 50, 3.0, 22);
    const Vector y = sample_response(x, truth, Family::linear, 23);
    const KnockoffBundle ko =
        gaussian_knockoffs(x, WorkingModel::from_covariance(shrinkage_covariance(x).sigma), 24);
    const AugmentedDesign d = AugmentedDesign::from(x, ko.x_hat);
    const NoiseEstimate est = estimate_noise_sd(d.cols, y);
    const double s = est.sigma;
    CHECK(est.max_kkt_residual <= 1e-6);
    CHECK(est.fits > 40);
    CHECK(s > 0.8);
    CHECK(s < 1.6);
  }
  SUBCASE("pure noise response") {
    const Matrix x = test::random_matrix(100, 30, 25);
    const Vector y = 3.0 * test::random_matrix(100, 1, 26).col(0);
    CHECK(estimate_noise_sd(x, y).sigma == doctest::Approx(3.0).epsilon(0.2));
  }
}

TEST_CASE("statistic dispatcher") {
  const Matrix x = test::random_matrix(120, 10, 27);
  const Matrix xh = test::random_matrix(120, 10, 28);
  const GroundTruth truth = make_truth(10, 3, 2.0, 29);
  const Vector y = sample_response(x, truth, Family::linear, 30);
  const StatResult r = knockoff_statistics(StatMethod::rcd_debiased, x, xh, y, Family::linear);
  CHECK(r.stats.w.size() == 10);
  CHECK(r.fits == 21);
  CHECK(r.max_kkt_residual <= 1e-6);
  CHECK(r.sigma_hat > 0.5);
  for (Eigen::Index j : truth.support) CHECK(r.stats.w(j) > 0.0);

  const StatResult m = knockoff_statistics(StatMethod::marginal_corr, x, xh, y, Family::linear);
  CHECK((m.stats.w - marginal_corr_stats(x, xh, y).w).cwiseAbs().maxCoeff() == 0.0);

  CHECK(stat_method_from_string(to_string(StatMethod::rcd_debiased_glm)) == StatMethod::rcd_debiased_glm);
  CHECK_THROWS_AS(stat_method_from_string("lasso"), Error);
}
