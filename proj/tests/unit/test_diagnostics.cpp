#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "ark/diagnostics.hpp"
#include "ark/error.hpp"
#include "ark/knockoffs.hpp"
#include "ark/rng.hpp"
#include "test_helpers.hpp"

using namespace ark;

namespace {

SymMatrix identity(Eigen::Index p) { return SymMatrix(Matrix::Identity(p, p)); }

/// Mean over coordinates of the KL statistic for t_nu(0, I) rows against
/// independent moment-matched Gaussian knockoffs.
double mean_kl(Eigen::Index n, Eigen::Index p, double nu, std::uint64_t seed) {
  const TSample ts = sample_t(n, identity(p), nu, seed);
  const SymMatrix matched(Matrix(nu / (nu - 2.0) * Matrix::Identity(p, p)));
  const KnockoffBundle ko = gaussian_knockoffs(ts.x, WorkingModel::from_covariance(matched), seed + 1);
  return empirical_kl_t_vs_gaussian(ts.x, ko.x_hat, nu).mean();
}

}  // namespace

TEST_CASE("coupling norm examples") {
  const Matrix a = test::random_matrix(4, 3, 1);
  CHECK(coupling_norm(a, a) == 0.0);
  Matrix b = a;
  b(2, 2) += 2.0;
  CHECK(coupling_norm(a, b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(coupling_norm(a, Matrix::Zero(4, 2)), Error);
}

TEST_CASE("coupling norm behaves as a norm of the difference") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Matrix a = test::random_matrix(20, 5, 3 * s + 10);
    const Matrix b = test::random_matrix(20, 5, 3 * s + 11);
    const Matrix c = test::random_matrix(20, 5, 3 * s + 12);
    CHECK(coupling_norm(a, b) >= 0.0);
    CHECK(coupling_norm(a, c) <= coupling_norm(a, b) + coupling_norm(b, c) + 1e-12);
    const Matrix scaled = a + (-2.5) * (b - a);
    CHECK(coupling_norm(a, scaled) == doctest::Approx(2.5 * coupling_norm(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("coupling estimate with the true model is zero") {
  const SymMatrix sigma = build_ar_covariance(6, 0.5);
  const SymMatrix omega = sym_inverse(sigma);
  const Matrix x = sample_gaussian(100, sigma, 2);
  const CouplingEstimate e = wasserstein_coupling_estimate(x, omega, omega, choose_r(sigma), 5, 3);
  CHECK(e.mean == 0.0);
  CHECK(e.max == 0.0);
  REQUIRE(e.norms.size() == 5);
}

TEST_CASE("coupling estimate summaries and seed stability") {
  const Eigen::Index p = 20;
  const SymMatrix sigma = sym_inverse(build_banded_precision(p, 0.2, 10));
  const Matrix x = sample_gaussian(300, sigma, 4);
  const SymMatrix sigma_hat = shrinkage_covariance(x).sigma;
  const double r = std::min(choose_r(sigma), choose_r(sigma_hat));
  const SymMatrix omega_hat = sym_inverse(sigma_hat);
  const SymMatrix omega = sym_inverse(sigma);
  const CouplingEstimate a = wasserstein_coupling_estimate(x, omega_hat, omega, r, 40, 5);
  const CouplingEstimate b = wasserstein_coupling_estimate(x, omega_hat, omega, r, 40, 6);
  CHECK(a.mean > 0.0);
  CHECK(a.min <= a.mean);
  CHECK(a.mean <= a.max);
  CHECK(std::abs(a.mean - b.mean) <= 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("coupling estimate shrinks as the covariance estimate improves") {
  const Eigen::Index p = 50;
  const SymMatrix omega = build_banded_precision(p, 0.2, 10);
  const SymMatrix sigma = sym_inverse(omega);
  auto estimate = [&](Eigen::Index n, std::uint64_t seed) {
    const Matrix x = sample_gaussian(n, sigma, seed);
    const SymMatrix sigma_hat = shrinkage_covariance(x).sigma;
    const double r = std::min(choose_r(sigma), choose_r(sigma_hat));
    return wasserstein_coupling_estimate(x, sym_inverse(sigma_hat), omega, r, 5, seed + 1).mean;
  };
  int smaller = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    smaller += estimate(4000, 1000 + 2 * t) < estimate(1000, 2000 + 2 * t);
  }
  CHECK(smaller >= 18);
}

TEST_CASE("condition constant") {
  const SymMatrix d = build_ar_covariance(5, 0.3);
  CHECK(lemma2_condition_constant(d, d) == 0.0);

  Matrix a = Matrix::Zero(4, 4), b = Matrix::Zero(4, 4);
  a.diagonal() << 1, 2, 3, 4;
  b.diagonal() << 2, 2, 1, 5;
  CHECK(lemma2_condition_constant(SymMatrix(a), SymMatrix(b)) == 0.0);

  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix base = Matrix::Zero(5, 5);
    for (int j = 0; j < 5; ++j) base(j, j) = 1.0 + rng.uniform();
    Matrix noise(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) noise(i, j) = 0.01 * rng.normal();
    const Matrix perturbed = base + 0.5 * (noise + noise.transpose());
    CHECK(lemma2_condition_constant(SymMatrix(perturbed), SymMatrix(base)) < 0.5);
  }
}

TEST_CASE("KL statistic: zero difference and antisymmetry") {
  const TSample ts = sample_t(50, identity(6), 8.0, 11);
  CHECK(empirical_kl_t_vs_gaussian(ts.x, ts.x, 8.0).cwiseAbs().maxCoeff() == 0.0);

  const Matrix xh = test::random_matrix(50, 6, 12);
  const Vector forward = empirical_kl_t_vs_gaussian(ts.x, xh, ts.x, 8.0);
  const Vector backward = empirical_kl_t_vs_gaussian(xh, ts.x, ts.x, 8.0);
  CHECK((forward + backward).cwiseAbs().maxCoeff() == 0.0);
  CHECK((forward - empirical_kl_t_vs_gaussian(ts.x, xh, 8.0)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(empirical_kl_t_vs_gaussian(ts.x, xh, 2.0), Error);
}

TEST_CASE("KL statistic is positive for heavy-tailed data") {
  int positive = 0;
  for (std::uint64_t rep = 0; rep < 50; ++rep) positive += mean_kl(200, 50, 10.0, 100 + 2 * rep) > 0.0;
  CHECK(positive >= 48);
}

TEST_CASE("KL statistic scales like n p / (nu (nu + p))") {
  const Eigen::Index n = 200, p = 50;
  double kl10 = 0.0, kl40 = 0.0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    kl10 += mean_kl(n, p, 10.0, 500 + 2 * rep);
    kl40 += mean_kl(n, p, 40.0, 900 + 2 * rep);
  }
  const double theory = (1.0 / (10.0 * (10.0 + p))) / (1.0 / (40.0 * (40.0 + p)));
  const double ratio = kl10 / kl40;
  MESSAGE("KL ratio " << ratio << " against " << theory);
  CHECK(ratio >= theory / 2.0);
  CHECK(ratio <= theory * 2.0);
}
