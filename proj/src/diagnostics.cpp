#include "ark/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ark/datagen.hpp"
#include "ark/knockoffs.hpp"
#include "ark/rng.hpp"

namespace ark {

double coupling_norm(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "coupling norm needs matrices of equal shape");
  }
  if (a.size() == 0) return 0.0;
  const double n = static_cast<double>(a.rows());
  return (a - b).colwise().norm().maxCoeff() / std::sqrt(n);
}

CouplingEstimate wasserstein_coupling_estimate(const Matrix& x, const SymMatrix& omega_hat,
                                               const SymMatrix& omega_true, double r,
                                               int resamples, std::uint64_t seed) {
  if (resamples < 1) throw Error(ErrorKind::InvalidArgument, "need at least one resample");
  if (x.cols() != omega_hat.dim() || x.cols() != omega_true.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "X and precision matrices disagree in dimension");
  }
  const Eigen::Index p = x.cols();
  const Matrix shift_hat = Matrix::Identity(p, p) - r * omega_hat.matrix();
  const Matrix shift_true = Matrix::Identity(p, p) - r * omega_true.matrix();
  // the mean parts do not depend on Z
  const Matrix mean_gap = x * (shift_hat - shift_true);
  const Matrix d_gap = knockoff_sqrt_factor(omega_hat, r).matrix() -
                       knockoff_sqrt_factor(omega_true, r).matrix();

  CouplingEstimate est;
  est.norms.reserve(static_cast<std::size_t>(resamples));
  const Matrix zero = Matrix::Zero(x.rows(), p);
  for (int b = 0; b < resamples; ++b) {
    const Matrix z = standard_normal_matrix(x.rows(), p,
                                            derive_seed(seed, {kTagResample, static_cast<std::uint64_t>(b)}));
    est.norms.push_back(coupling_norm(mean_gap + z * d_gap, zero));
  }
  const double m = static_cast<double>(resamples);
  est.mean = std::accumulate(est.norms.begin(), est.norms.end(), 0.0) / m;
  est.min = *std::min_element(est.norms.begin(), est.norms.end());
  est.max = *std::max_element(est.norms.begin(), est.norms.end());
  if (resamples > 1) {
    double ss = 0.0;
    for (double v : est.norms) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / (m - 1.0) / m);
  }
  return est;
}

double lemma2_condition_constant(const SymMatrix& d_hat, const SymMatrix& d) {
  if (d_hat.dim() != d.dim()) throw Error(ErrorKind::DimensionMismatch, "D matrices differ in size");
  double worst = 0.0;
  for (Eigen::Index j = 0; j < d.dim(); ++j) {
    const auto a = d_hat.matrix().col(j);
    const auto b = d.matrix().col(j);
    const double gap = (a - b).squaredNorm();
    const double num = std::max(0.0, a.norm() * b.norm() - a.dot(b));
    if (gap == 0.0) continue;  // then num == 0 as well
    worst = std::max(worst, num / gap);
  }
  return worst;
}

Vector empirical_kl_t_vs_gaussian(const Matrix& x, const Matrix& x_hat, const Matrix& context,
                                  double nu) {
  if (!(nu > 2.0)) throw Error(ErrorKind::InvalidNu, "degrees of freedom must exceed 2");
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols() || x.rows() != context.rows() ||
      x.cols() != context.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "KL statistic needs matrices of equal shape");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double half = (nu + static_cast<double>(p)) / 2.0;
  const double quad = (nu - 2.0) / (2.0 * nu);
  const Vector row_sq = context.rowwise().squaredNorm();
  Vector kl = Vector::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double denom = nu + row_sq(i) - context(i, j) * context(i, j);
      const double a = x(i, j) * x(i, j);
      const double b = x_hat(i, j) * x_hat(i, j);
      total += (a - b) * quad - half * (std::log1p(a / denom) - std::log1p(b / denom));
    }
    kl(j) = total;
  }
  return kl;
}

Vector empirical_kl_t_vs_gaussian(const Matrix& x, const Matrix& x_hat, double nu) {
  return empirical_kl_t_vs_gaussian(x, x_hat, x, nu);
}

}  // namespace ark
