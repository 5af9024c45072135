#pragma once

#include <Eigen/Dense>

#include "ark/error.hpp"

namespace ark {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative tolerance used for every PSD check and eigenvalue clamp.
inline constexpr double kPsdTolerance = 1e-8;

/// Dense symmetric matrix. Construction enforces exact symmetry: inputs whose
/// asymmetry exceeds 1e-8 relative are rejected, anything smaller is averaged
/// away so that entry (i, j) and (j, i) are bitwise equal.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix diagonal(const Vector& d);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymMatrix scaled(double c) const;

 private:
  Matrix m_;
};

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
struct SymEigen {
  Vector values;
  Matrix vectors;

  double min() const { return values(0); }
  double max() const { return values(values.size() - 1); }
  /// max(1, largest |eigenvalue|); the reference scale for PSD tolerances.
  double scale() const;
};

SymEigen sym_eigen(const SymMatrix& m);

/// Rebuilds V diag(f(values)) V^T.
template <class F>
SymMatrix sym_apply(const SymEigen& eig, F&& f) {
  Vector mapped(eig.values.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = f(eig.values(i));
  return SymMatrix(eig.vectors * mapped.asDiagonal() * eig.vectors.transpose());
}

bool is_psd(const SymMatrix& m);
double min_eigenvalue(const SymMatrix& m);

/// Principal square root. Eigenvalues in [-1e-8 scale, 0) are clamped to zero;
/// anything more negative throws NotPSD.
SymMatrix sym_psd_sqrt(const SymMatrix& m);
SymMatrix sym_psd_sqrt(const SymEigen& eig);

/// Inverse through the eigendecomposition, so the result is exactly symmetric.
/// Throws SingularCovariance when the smallest eigenvalue is not positive.
SymMatrix sym_inverse(const SymMatrix& m);
SymMatrix sym_inverse(const SymEigen& eig);

double max_abs(const Matrix& m);

struct CovarianceEstimate {
  SymMatrix sigma;
  SymMatrix omega;
  /// Shrinkage intensity toward the diagonal of the sample covariance.
  double intensity = 0.0;
};

/// Shrinks the sample covariance S toward diag(S):
///   sigma = (1 - d) S + d diag(S),
///   d = clamp(sum_{i != j} Var(s_ij) / sum_{i != j} s_ij^2, 0, 1),
/// where Var(s_ij) = n / (n-1)^3 sum_k (w_kij - mean_k w_kij)^2 and
/// w_kij = (x_ki - xbar_i)(x_kj - xbar_j). The intensity has a closed form
/// so the estimate is deterministic in X.
CovarianceEstimate shrinkage_covariance(const Matrix& x);

/// Omega_ij = base^|i-j| for |i-j| < band, zero otherwise.
SymMatrix build_banded_precision(Eigen::Index p, double base, int band);

/// Sigma_ij = rho^|i-j|.
SymMatrix build_ar_covariance(Eigen::Index p, double rho);

}  // namespace ark
