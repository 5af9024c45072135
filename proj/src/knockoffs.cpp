#include "ark/knockoffs.hpp"

#include <algorithm>
#include <cmath>

#include "ark/rng.hpp"

namespace ark {

namespace {

void check_shape(const Matrix& x, Eigen::Index p, const char* what) {
  if (x.cols() != p) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " has " + std::to_string(x.cols()) +
                                                  " columns, model has dimension " + std::to_string(p));
  }
}

Matrix shift_matrix(const SymMatrix& omega, double r) {
  return Matrix::Identity(omega.dim(), omega.dim()) - r * omega.matrix();
}

}  // namespace

std::string to_string(Construction c) {
  switch (c) {
    case Construction::gaussian: return "gaussian";
    case Construction::t_coupled: return "t_coupled";
    case Construction::nonparanormal: return "nonparanormal";
  }
  return "unknown";
}

double choose_r(const SymMatrix& sigma) {
  const SymEigen eig = sym_eigen(sigma);
  if (!(eig.min() > 0.0)) {
    throw Error(ErrorKind::NotPSD, "covariance must be positive definite to choose r");
  }
  return 0.95 * std::min(2.0 * eig.min(), sigma.matrix().diagonal().minCoeff());
}

SymMatrix knockoff_sqrt_factor(const SymMatrix& omega, double r) {
  const Eigen::Index p = omega.dim();
  const Matrix m = 2.0 * r * Matrix::Identity(p, p) - r * r * omega.matrix();
  return sym_psd_sqrt(SymMatrix(m));
}

WorkingModel WorkingModel::from_covariance(const SymMatrix& sigma, std::optional<double> r) {
  const SymEigen eig = sym_eigen(sigma);
  if (!(eig.min() > 0.0)) {
    throw Error(ErrorKind::NotPSD, "working covariance must be positive definite");
  }
  const double min_diag = sigma.matrix().diagonal().minCoeff();
  const double rr = r.value_or(0.95 * std::min(2.0 * eig.min(), min_diag));
  if (!(rr > 0.0) || rr > min_diag * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidArgument,
                "r = " + std::to_string(rr) + " outside (0, min_j sigma_jj]");
  }
  WorkingModel m;
  m.sigma_hat = sigma;
  m.omega_hat = sym_inverse(eig);
  m.r = rr;
  // 2rI - r^2 omega shares eigenvectors with sigma: eigenvalues 2r - r^2 / lambda.
  SymEigen factor_eig{eig.values.unaryExpr([rr](double v) { return 2.0 * rr - rr * rr / v; }),
                      eig.vectors};
  m.sqrt_factor = sym_psd_sqrt(factor_eig);
  return m;
}

WorkingModel WorkingModel::from_precision(const SymMatrix& omega, double r) {
  WorkingModel m;
  m.omega_hat = omega;
  m.sigma_hat = sym_inverse(omega);
  const double min_diag = m.sigma_hat.matrix().diagonal().minCoeff();
  if (!(r > 0.0) || r > min_diag * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidArgument,
                "r = " + std::to_string(r) + " outside (0, min_j sigma_jj]");
  }
  m.r = r;
  m.sqrt_factor = knockoff_sqrt_factor(omega, r);
  return m;
}

KnockoffBundle gaussian_knockoffs_with_noise(const Matrix& x, const WorkingModel& model, Matrix z) {
  check_shape(x, model.dim(), "X");
  if (z.rows() != x.rows() || z.cols() != x.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "noise matrix shape differs from X");
  }
  KnockoffBundle b;
  b.x_hat = x * shift_matrix(model.omega_hat, model.r) + z * model.sqrt_factor.matrix();
  b.z = std::move(z);
  b.construction = Construction::gaussian;
  b.r = model.r;
  return b;
}

KnockoffBundle gaussian_knockoffs(const Matrix& x, const WorkingModel& model, std::uint64_t seed) {
  return gaussian_knockoffs_with_noise(x, model, standard_normal_matrix(x.rows(), x.cols(), seed));
}

KnockoffBundle coupled_gaussian_pair(const Matrix& x, const SymMatrix& omega_hat,
                                     const SymMatrix& omega_true, double r, std::uint64_t seed) {
  check_shape(x, omega_hat.dim(), "X");
  check_shape(x, omega_true.dim(), "X");
  const SymMatrix d_hat = knockoff_sqrt_factor(omega_hat, r);
  const SymMatrix d_true = knockoff_sqrt_factor(omega_true, r);
  KnockoffBundle b;
  b.z = standard_normal_matrix(x.rows(), x.cols(), seed);
  b.x_hat = x * shift_matrix(omega_hat, r) + b.z * d_hat.matrix();
  b.x_tilde = x * shift_matrix(omega_true, r) + b.z * d_true.matrix();
  b.construction = Construction::gaussian;
  b.r = r;
  return b;
}

KnockoffBundle t_coupled_knockoffs(const TSample& ts, const SymMatrix& theta_hat,
                                   const SymMatrix& omega_true, double r, std::uint64_t seed) {
  if (!ts.has_latents()) {
    throw Error(ErrorKind::MissingLatents, "t sample carries no chi-square latents");
  }
  if (!(ts.nu > 2.0)) throw Error(ErrorKind::InvalidNu, "degrees of freedom must exceed 2");
  check_shape(ts.x, theta_hat.dim(), "X");
  check_shape(ts.x, omega_true.dim(), "X");
  const SymMatrix d_hat = knockoff_sqrt_factor(theta_hat, r);
  const SymMatrix d_true = knockoff_sqrt_factor(omega_true, r);

  KnockoffBundle b;
  b.z = standard_normal_matrix(ts.x.rows(), ts.x.cols(), seed);
  b.x_hat = ts.x * shift_matrix(theta_hat, r) + b.z * d_hat.matrix();
  const Vector row_scale = (ts.q / ts.nu).cwiseSqrt().cwiseInverse();
  b.x_tilde = ts.x * shift_matrix(omega_true, r) + row_scale.asDiagonal() * (b.z * d_true.matrix());
  b.construction = Construction::t_coupled;
  b.r = r;
  return b;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> column) : sorted_(std::move(column)) {
  if (sorted_.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "empirical CDF needs at least two observations");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::cdf(double x) const {
  const double n = static_cast<double>(sorted_.size());
  const auto rank = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return std::clamp(static_cast<double>(rank) / n, 0.5 / n, 1.0 - 0.5 / n);
}

double EmpiricalCdf::quantile(double u) const {
  const auto n = sorted_.size();
  const double pos = u * static_cast<double>(n);  // x_(k) sits at pos == k (1-based)
  if (!(pos > 1.0)) return sorted_.front();
  if (pos >= static_cast<double>(n)) return sorted_.back();
  const auto k = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(k);
  return sorted_[k - 1] + frac * (sorted_[k] - sorted_[k - 1]);
}

EmpiricalCdf winsorized_ecdf(const Vector& column) {
  return EmpiricalCdf(std::vector<double>(column.data(), column.data() + column.size()));
}

std::vector<MarginalPtr> winsorized_ecdfs(const Matrix& x) {
  std::vector<MarginalPtr> out;
  out.reserve(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    out.push_back(std::make_shared<EmpiricalCdf>(winsorized_ecdf(x.col(j))));
  }
  return out;
}

namespace {

Matrix to_latent(const Matrix& x, const std::vector<MarginalPtr>& cdfs, bool check_range) {
  const Eigen::Index n = x.rows();
  const double lo = 0.5 / static_cast<double>(n);
  const double hi = 1.0 - lo;
  Matrix v(n, x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Marginal& f = *cdfs[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = f.cdf(x(i, j));
      if (check_range && (u < lo * (1.0 - 1e-12) || u > hi + 1e-12 * lo)) {
        throw Error(ErrorKind::CdfRangeViolation,
                    "F_hat(X) = " + std::to_string(u) + " outside [1/(2n), 1 - 1/(2n)]", j);
      }
      v(i, j) = normal_quantile(u);
    }
  }
  return v;
}

Matrix from_latent(const Matrix& u, const std::vector<MarginalPtr>& cdfs) {
  Matrix out(u.rows(), u.cols());
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const Marginal& f = *cdfs[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < u.rows(); ++i) out(i, j) = f.quantile(normal_cdf(u(i, j)));
  }
  return out;
}

void check_cdfs(const Matrix& x, const std::vector<MarginalPtr>& cdfs) {
  if (static_cast<Eigen::Index>(cdfs.size()) != x.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "need one CDF per column");
  }
  for (const auto& f : cdfs) {
    if (!f) throw Error(ErrorKind::InvalidArgument, "null CDF estimate");
  }
}

}  // namespace

KnockoffBundle nonparanormal_knockoffs(const Matrix& x, const std::vector<MarginalPtr>& cdf_hat,
                                       const SymMatrix& omega_hat, double r, std::uint64_t seed) {
  check_shape(x, omega_hat.dim(), "X");
  check_cdfs(x, cdf_hat);
  const Matrix v_hat = to_latent(x, cdf_hat, true);
  const SymMatrix d_hat = knockoff_sqrt_factor(omega_hat, r);
  KnockoffBundle b;
  b.z = standard_normal_matrix(x.rows(), x.cols(), seed);
  const Matrix u_hat = v_hat * shift_matrix(omega_hat, r) + b.z * d_hat.matrix();
  b.x_hat = from_latent(u_hat, cdf_hat);
  b.construction = Construction::nonparanormal;
  b.r = r;
  return b;
}

KnockoffBundle nonparanormal_coupled_knockoffs(const Matrix& x, const std::vector<MarginalPtr>& cdf_hat,
                                               const std::vector<MarginalPtr>& cdf_true,
                                               const SymMatrix& omega_hat, const SymMatrix& omega_true,
                                               double r, std::uint64_t seed) {
  KnockoffBundle b = nonparanormal_knockoffs(x, cdf_hat, omega_hat, r, seed);
  check_shape(x, omega_true.dim(), "X");
  check_cdfs(x, cdf_true);
  const Matrix v_true = to_latent(x, cdf_true, false);
  const SymMatrix d_true = knockoff_sqrt_factor(omega_true, r);
  const Matrix u_true = v_true * shift_matrix(omega_true, r) + b.z * d_true.matrix();
  b.x_tilde = from_latent(u_true, cdf_true);
  return b;
}

}  // namespace ark
