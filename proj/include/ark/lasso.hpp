#pragma once

#include "ark/datagen.hpp"
#include "ark/linalg.hpp"

namespace ark {

struct LassoOptions {
  /// Cap on coordinate sweeps (inner sweeps for the logistic solver).
  int max_sweeps = 100000;
  /// Sweep stops once the largest coefficient change < tol (1 + max |beta|).
  double tol = 1e-8;
  /// Accepted fits have a max-norm subgradient residual at most this.
  double kkt_tol = 1e-6;
};

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

/// Max-norm distance of -grad from lambda * subdifferential(|beta|_1).
/// Coordinates equal to `skip` are ignored.
double kkt_residual(const Vector& grad, const Vector& beta, double lambda, Eigen::Index skip = -1);

struct GramLassoResult {
  Vector beta;
  double kkt_residual = 0.0;
  int sweeps = 0;
  bool converged = false;
};

/// Coordinate descent for min_b 0.5 b'Gb - c'b + lambda |b|_1 with covariance
/// updates. Coordinate `skip` (if >= 0) is held at zero, which turns a Gram
/// matrix G and c = G.col(j) into the nodewise problem for column j.
/// `warm` (optional) seeds the iterate, e.g. along a decreasing lambda path.
GramLassoResult gram_lasso(const Matrix& gram, const Vector& c, double lambda,
                           const LassoOptions& opts = {}, Eigen::Index skip = -1,
                           const Vector* warm = nullptr);

/// Centering and scaling to unit root-mean-square column norm. Logistic fits
/// have no intercept, so their designs are scaled but not centered.
struct Standardization {
  Vector center;
  Vector scale;

  static Standardization fit(const Matrix& x, bool center = true);
  static Standardization for_family(const Matrix& x, Family family) {
    return fit(x, family == Family::linear);
  }
  Matrix apply(const Matrix& x) const;
};

struct LassoFit {
  Vector coef;             // original scale
  double intercept = 0.0;  // linear family only
  Vector coef_std;         // standardized scale
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Penalized fit of y on the design:
///   linear:   (2n)^{-1} |y - Xb|^2 + lambda |b|_1
///   logistic: n^{-1} sum [log(1 + e^{x_i'b}) - y_i x_i'b] + lambda |b|_1  (no intercept)
/// Columns are standardized internally (see Standardization), so lambda applies
/// on that scale; the linear fit centers y as well. Non-convergence after
/// max_sweeps returns the best iterate with converged == false.
LassoFit lasso_fit(const Matrix& design, const Vector& y, double lambda, Family family,
                   const LassoOptions& opts = {});

/// Same as lasso_fit but on an already standardized design; coef == coef_std.
LassoFit lasso_fit_standardized(const Matrix& xs, const Vector& y, double lambda, Family family,
                                const LassoOptions& opts = {});

/// Logistic negative log-likelihood averaged over rows and its gradient.
double logistic_loss(const Matrix& x, const Vector& y, const Vector& beta);
Vector logistic_gradient(const Matrix& x, const Vector& y, const Vector& beta);

}  // namespace ark
