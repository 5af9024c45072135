#include "doctest.h"
#include "test_helpers.hpp"

using namespace ark;

TEST_CASE("SymMatrix enforces symmetry") {
  Matrix m(2, 2);
  m << 1.0, 0.5, 0.5 + 1e-13, 2.0;
  const SymMatrix s(m);
  CHECK(s(0, 1) == s(1, 0));
  m(1, 0) = 0.6;
  CHECK_THROWS_AS(SymMatrix{m}, Error);
  CHECK_THROWS_AS(SymMatrix{Matrix(2, 3)}, Error);
}

TEST_CASE("sym_psd_sqrt: closed-form cases") {
  CHECK((sym_psd_sqrt(SymMatrix::identity(2)).matrix() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  const SymMatrix d = SymMatrix::diagonal(Vector::Map(std::vector<double>{4.0, 9.0}.data(), 2));
  const Matrix s = sym_psd_sqrt(d).matrix();
  CHECK(s(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(s(0, 1)) < 1e-14);

  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const Matrix r = sym_psd_sqrt(SymMatrix(m)).matrix();
  CHECK((r * r - m).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("sym_psd_sqrt: clamps tiny negatives, rejects real ones") {
  Matrix v = test::random_matrix(4, 4, 3).householderQr().householderQ();
  Vector ev(4);
  ev << -1e-12, 0.5, 1.0, 2.0;
  const SymMatrix nearly(v * ev.asDiagonal() * v.transpose());
  const Matrix s = sym_psd_sqrt(nearly).matrix();
  CHECK((s * s - nearly.matrix()).cwiseAbs().maxCoeff() < 1e-8);
  ev(0) = -1e-3;
  CHECK_THROWS_AS(sym_psd_sqrt(SymMatrix(v * ev.asDiagonal() * v.transpose())), Error);
}

TEST_CASE("sym_psd_sqrt round trip on random low-rank PSD matrices") {
  for (int t = 0; t < 50; ++t) {
    const Matrix b = test::random_matrix(6, 3 + t % 4, 100 + t);
    const SymMatrix m(b * b.transpose());
    const Matrix s = sym_psd_sqrt(m).matrix();
    const double scale = std::max(1.0, m.matrix().cwiseAbs().maxCoeff());
    CHECK((s * s - m.matrix()).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  }
}

TEST_CASE("sym_inverse") {
  const Matrix b = test::random_matrix(5, 5, 9);
  const SymMatrix m(b * b.transpose() + Matrix::Identity(5, 5));
  const SymMatrix inv = sym_inverse(m);
  CHECK((m.matrix() * inv.matrix() - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(inv(1, 3) == inv(3, 1));
  CHECK_THROWS_AS(sym_inverse(SymMatrix(Matrix::Zero(3, 3))), Error);
}

namespace {

/// Intensity straight from the definition, with explicit loops over k.
double reference_intensity(const Matrix& x) {
  const auto n = x.rows();
  const auto p = x.cols();
  const double nd = static_cast<double>(n);
  const Matrix xc = x.rowwise() - x.colwise().mean();
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i == j) continue;
      double wbar = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) wbar += xc(k, i) * xc(k, j);
      wbar /= nd;
      double ss = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double d = xc(k, i) * xc(k, j) - wbar;
        ss += d * d;
      }
      const double s_ij = wbar * nd / (nd - 1.0);
      num += nd / std::pow(nd - 1.0, 3) * ss;
      den += s_ij * s_ij;
    }
  }
  return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace

TEST_CASE("shrinkage_covariance matches the definition") {
  const Matrix x = test::random_matrix(30, 6, 11);
  const CovarianceEstimate est = shrinkage_covariance(x);
  const double delta = reference_intensity(x);
  CHECK(est.intensity == doctest::Approx(delta).epsilon(1e-10));
  const Matrix s = test::sample_cov(x);
  Matrix expected = (1.0 - delta) * s;
  expected.diagonal() = s.diagonal();
  CHECK((est.sigma.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((est.sigma.matrix() * est.omega.matrix() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("shrinkage_covariance examples") {
  const Matrix x1 = test::random_matrix(40, 1, 5) * 3.0;
  CHECK(shrinkage_covariance(x1).sigma(0, 0) == doctest::Approx(test::sample_cov(x1)(0, 0)).epsilon(1e-12));

  const Matrix big = test::random_matrix(10000, 5, 6);
  CHECK((shrinkage_covariance(big).sigma.matrix() - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 0.1);

  Matrix col = test::random_matrix(200, 3, 7);
  col.col(1) = col.col(0) + 1e-3 * test::random_matrix(200, 1, 8);
  const CovarianceEstimate est = shrinkage_covariance(col);
  CHECK(est.omega.matrix().allFinite());
  CHECK((est.sigma.matrix() * est.omega.matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);

  Matrix constant = test::random_matrix(20, 3, 9);
  constant.col(2).setConstant(1.5);
  CHECK_THROWS_AS(shrinkage_covariance(constant), Error);
  CHECK_THROWS_AS(shrinkage_covariance(Matrix::Ones(1, 3)), Error);
}

TEST_CASE("build_banded_precision") {
  const SymMatrix o = build_banded_precision(3, 0.2, 10);
  Matrix expected(3, 3);
  expected << 1, 0.2, 0.04, 0.2, 1, 0.2, 0.04, 0.2, 1;
  CHECK((o.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((build_banded_precision(7, 0.7, 1).matrix() - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff() == 0.0);
  const SymMatrix big = build_banded_precision(400, 0.2, 10);
  CHECK(min_eigenvalue(big) > 0.0);
  CHECK(big(0, 9) == doctest::Approx(std::pow(0.2, 9)));
  CHECK(big(0, 10) == 0.0);
  CHECK_THROWS_AS(build_banded_precision(20, 0.9, 2), Error);
  CHECK_THROWS_AS(build_banded_precision(5, 1.5, 5), Error);
}

TEST_CASE("build_ar_covariance") {
  const SymMatrix s = build_ar_covariance(2, 0.5);
  CHECK(s(0, 1) == 0.5);
  CHECK(s(1, 1) == 1.0);
  CHECK((build_ar_covariance(4, 0.0).matrix() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  const Matrix inv = sym_inverse(build_ar_covariance(50, 0.5)).matrix();
  double off_band = 0.0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j)
      if (std::abs(i - j) > 1) off_band = std::max(off_band, std::abs(inv(i, j)));
  CHECK(off_band < 1e-8);
  CHECK_THROWS_AS(build_ar_covariance(3, 1.0), Error);
}
