#pragma once

#include <limits>
#include <string>

#include "ark/datagen.hpp"
#include "ark/lasso.hpp"
#include "ark/linalg.hpp"

namespace ark {

/// [X, X_hat]: column j + p is the knockoff of column j.
struct AugmentedDesign {
  Matrix cols;

  static AugmentedDesign from(const Matrix& x, const Matrix& x_hat);
  Eigen::Index n() const { return cols.rows(); }
  Eigen::Index p() const { return cols.cols() / 2; }
  /// Copy with original column j and its knockoff exchanged.
  AugmentedDesign swapped(Eigen::Index j) const;
};

enum class StatMethod { marginal_corr, rcd_lasso, rcd_debiased, rcd_debiased_glm };
std::string to_string(StatMethod m);
StatMethod stat_method_from_string(const std::string& s);

struct StatVector {
  Vector w;
  StatMethod method = StatMethod::marginal_corr;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double lambda_j = std::numeric_limits<double>::quiet_NaN();
};

/// W_j = (sqrt(n) |y|_2)^{-1} (|X_j'y| - |X_hat_j'y|). Throws ZeroResponse when y = 0.
StatVector marginal_corr_stats(const Matrix& x, const Matrix& x_hat, const Vector& y);

/// W_j = |beta_j| - |beta_{j+p}|.
StatVector rcd_stats(const Vector& beta_aug, StatMethod method = StatMethod::rcd_debiased);

struct NodewiseScore {
  Vector z;      // col_j - cols_{-j} gamma
  Vector gamma;  // length 2p with gamma(j) == 0
  double kkt_residual = 0.0;
  bool converged = false;
};

/// Lasso of column j on the remaining columns of the design as given (no
/// internal standardization):
///   gamma = argmin (2n)^{-1} |col_j - cols_{-j} b|^2 + lambda_j |b|_1.
/// Throws NoConvergence, or DegenerateScore if |z' col_j| < 1e-10 n.
NodewiseScore nodewise_score(const AugmentedDesign& design, Eigen::Index j, double lambda_j,
                             const LassoOptions& opts = {});

/// Output of a one-step corrected Lasso on the augmented design.
struct DebiasedFit {
  Vector coef;  // corrected, original column scale, length 2p
  Vector init;  // initial Lasso, original column scale
  double lambda = 0.0;
  double lambda_j = 0.0;
  /// Largest KKT residual over the initial fit and all 2p nodewise fits.
  double max_kkt_residual = 0.0;
  int fits = 0;
};

/// beta_j = beta_init_j + z_j'(y - X beta_init) / (z_j' X_j), with z_j the
/// nodewise score. Columns are standardized internally and results mapped
/// back to the original scale. lambda_j is shared by every column.
DebiasedFit debiased_lasso(const AugmentedDesign& design, const Vector& y, double lambda,
                           double lambda_j, const LassoOptions& opts = {});

/// Per-observation loss derivatives at the linear predictor eta:
/// rho_dot = b'(eta) - y and weight = b''(eta).
struct GlmTerms {
  Vector rho_dot;
  Vector weight;
};
GlmTerms glm_terms(const Vector& eta, const Vector& y, Family family);

/// GLM one-step correction with weights D = diag(rho''(y_i, x_i'beta)) at the
/// Lasso fit:
///   Sigma = n^{-1} X'DX,  gamma_j from the Sigma-metric nodewise Lasso,
///   tau_j^2 = Sigma_jj - Sigma_{j,-j} gamma_j,
///   b_j = beta_j - n^{-1} rho_dot'(X_j - X_{-j} gamma_j) / tau_j^2.
/// Family::logistic is the intended use; Family::linear plugs in squared loss.
/// Throws DegenerateTau when tau_j^2 <= 1e-10.
DebiasedFit glm_debiased(const AugmentedDesign& design, const Vector& y, double lambda,
                         double lambda_j, Family family = Family::logistic,
                         const LassoOptions& opts = {});

/// sqrt(log(2p) / n), the common rate of every regularization parameter.
double lambda_rate(Eigen::Index n, Eigen::Index p);

/// Regularization constants. Linear: lambda = linear_const * sigma_hat * rate;
/// logistic: lambda = logistic_const * rate; nodewise: lambda_j = nodewise_const * rate.
struct LambdaRule {
  double linear_const = 1.0;
  double logistic_const = 0.5;
  double nodewise_const = 1.0;
};

/// Noise level for the linear lambda. A preliminary Lasso is tuned by K-fold
/// cross-validation over a log-spaced path (folds by row index mod K), then
///   sigma^2 = |y - X b_cv|^2 / (n - |S_cv| - 1).
/// The path stops five points past the cv minimum, or when a fold fit saturates.
/// Every path fit must meet the KKT tolerance; the largest residual is reported.
struct NoiseEstimate {
  double sigma = 0.0;
  double max_kkt_residual = 0.0;
  int fits = 0;
};
NoiseEstimate estimate_noise_sd(const Matrix& design, const Vector& y, const LassoOptions& opts = {},
                                int folds = 5, int path_length = 40);

struct StatResult {
  StatVector stats;
  double max_kkt_residual = 0.0;  // includes the noise-level tuning fits
  int fits = 0;                   // statistic fits only
  double sigma_hat = std::numeric_limits<double>::quiet_NaN();
};

/// Runs the full statistic for (X, X_hat, y) with the default lambdas.
StatResult knockoff_statistics(StatMethod method, const Matrix& x, const Matrix& x_hat,
                               const Vector& y, Family family, const LambdaRule& rule = {},
                               const LassoOptions& opts = {});

}  // namespace ark
