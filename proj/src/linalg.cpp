#include "ark/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ark {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "symmetric matrix must be square, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = m.rows() > 0 ? (m - m.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > kPsdTolerance * scale) {
    throw Error(ErrorKind::InvalidArgument,
                "matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Matrix::Identity(dim, dim));
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  return SymMatrix(Matrix(d.asDiagonal()));
}

SymMatrix SymMatrix::scaled(double c) const {
  SymMatrix out;
  out.m_ = c * m_;
  return out;
}

double SymEigen::scale() const {
  if (values.size() == 0) return 1.0;
  return std::max({1.0, std::abs(min()), std::abs(max())});
}

SymEigen sym_eigen(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPSD, "eigendecomposition failed");
  }
  return SymEigen{solver.eigenvalues(), solver.eigenvectors()};
}

bool is_psd(const SymMatrix& m) {
  const SymEigen eig = sym_eigen(m);
  return eig.min() >= -kPsdTolerance * eig.scale();
}

double min_eigenvalue(const SymMatrix& m) {
  return sym_eigen(m).min();
}

SymMatrix sym_psd_sqrt(const SymEigen& eig) {
  const double tol = kPsdTolerance * eig.scale();
  if (eig.values.size() > 0 && eig.min() < -tol) {
    throw Error(ErrorKind::NotPSD,
                "minimum eigenvalue " + std::to_string(eig.min()) + " below tolerance");
  }
  return sym_apply(eig, [](double v) { return std::sqrt(std::max(v, 0.0)); });
}

SymMatrix sym_psd_sqrt(const SymMatrix& m) {
  return sym_psd_sqrt(sym_eigen(m));
}

SymMatrix sym_inverse(const SymEigen& eig) {
  if (eig.values.size() > 0 && !(eig.min() > 1e-14 * eig.scale())) {
    throw Error(ErrorKind::SingularCovariance,
                "matrix is singular (min eigenvalue " + std::to_string(eig.min()) + ")");
  }
  return sym_apply(eig, [](double v) { return 1.0 / v; });
}

SymMatrix sym_inverse(const SymMatrix& m) {
  return sym_inverse(sym_eigen(m));
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

CovarianceEstimate shrinkage_covariance(const Matrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n < 2) {
    throw Error(ErrorKind::DegenerateData, "need at least two observations");
  }
  const Matrix xc = x.rowwise() - x.colwise().mean();
  const double nd = static_cast<double>(n);
  const Matrix s = (xc.transpose() * xc) / (nd - 1.0);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(s(j, j) > 1e-12)) {
      throw Error(ErrorKind::DegenerateData, "column has (near) zero variance", j);
    }
  }

  double intensity = 0.0;
  if (p > 1) {
    const Matrix xsq = xc.cwiseProduct(xc);
    const Matrix w2 = xsq.transpose() * xsq;  // sum_k w_kij^2
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < p; ++i) {
        if (i == j) continue;
        const double wbar = (nd - 1.0) / nd * s(i, j);
        const double ss = std::max(w2(i, j) - nd * wbar * wbar, 0.0);
        num += nd / ((nd - 1.0) * (nd - 1.0) * (nd - 1.0)) * ss;
        den += s(i, j) * s(i, j);
      }
    }
    intensity = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 1.0;
  }

  Matrix shrunk = (1.0 - intensity) * s;
  shrunk.diagonal() = s.diagonal();
  SymMatrix sigma(shrunk);
  SymMatrix omega = sym_inverse(sigma);
  return CovarianceEstimate{std::move(sigma), std::move(omega), intensity};
}

SymMatrix build_banded_precision(Eigen::Index p, double base, int band) {
  if (p < 1 || !(base > 0.0 && base < 1.0) || band < 1) {
    throw Error(ErrorKind::InvalidArgument, "banded precision needs p >= 1, 0 < base < 1, band >= 1");
  }
  Matrix m = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto lag = std::abs(i - j);
      if (lag < band) m(i, j) = std::pow(base, static_cast<double>(lag));
    }
  }
  SymMatrix out(m);
  if (!(min_eigenvalue(out) > 0.0)) {
    throw Error(ErrorKind::NotPSD, "banded precision is not positive definite");
  }
  return out;
}

SymMatrix build_ar_covariance(Eigen::Index p, double rho) {
  if (p < 1 || !(std::abs(rho) < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "AR covariance needs p >= 1 and |rho| < 1");
  }
  Matrix m(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      m(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
  }
  return SymMatrix(m);
}

}  // namespace ark
