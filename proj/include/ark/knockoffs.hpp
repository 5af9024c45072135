#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ark/datagen.hpp"
#include "ark/linalg.hpp"

namespace ark {

/// Gaussian working distribution used to generate equicorrelated knockoffs.
/// Invariants (checked on construction): 2rI - r^2 omega_hat is PSD and
/// r <= min_j sigma_hat_jj.
struct WorkingModel {
  SymMatrix sigma_hat;
  SymMatrix omega_hat;
  double r = 0.0;
  SymMatrix sqrt_factor;  // (2rI - r^2 omega_hat)^{1/2}

  /// Builds the model from a covariance; r defaults to choose_r(sigma).
  /// One eigendecomposition serves the inverse, r and the square root.
  static WorkingModel from_covariance(const SymMatrix& sigma, std::optional<double> r = std::nullopt);
  static WorkingModel from_precision(const SymMatrix& omega, double r);

  Eigen::Index dim() const { return omega_hat.dim(); }
};

/// r = 0.95 min(2 lambda_min(sigma), min_j sigma_jj).
double choose_r(const SymMatrix& sigma);

/// (2rI - r^2 omega)^{1/2}; negative eigenvalues within tolerance are clamped.
SymMatrix knockoff_sqrt_factor(const SymMatrix& omega, double r);

enum class Construction { gaussian, t_coupled, nonparanormal };
std::string to_string(Construction c);

struct KnockoffBundle {
  Matrix x_hat;
  std::optional<Matrix> x_tilde;  // coupled perfect knockoffs, same z and r
  Matrix z;
  Construction construction = Construction::gaussian;
  double r = 0.0;
};

/// X_hat = X (I - r omega_hat) + Z (2rI - r^2 omega_hat)^{1/2}, Z i.i.d. N(0,1).
KnockoffBundle gaussian_knockoffs(const Matrix& x, const WorkingModel& model, std::uint64_t seed);
/// Same construction with caller-supplied noise.
KnockoffBundle gaussian_knockoffs_with_noise(const Matrix& x, const WorkingModel& model, Matrix z);

/// Approximate (omega_hat) and perfect (omega_true) knockoffs sharing z and r.
KnockoffBundle coupled_gaussian_pair(const Matrix& x, const SymMatrix& omega_hat,
                                     const SymMatrix& omega_true, double r, std::uint64_t seed);

/// Multivariate-t features with a Gaussian working model:
///   X_hat   = X (I - r theta_hat) + Z (2rI - r^2 theta_hat)^{1/2}
///   X_tilde = X (I - r omega)     + diag(1/sqrt(Q/nu)) Z (2rI - r^2 omega)^{1/2}
/// where omega is the precision of the t scale matrix.
KnockoffBundle t_coupled_knockoffs(const TSample& ts, const SymMatrix& theta_hat,
                                   const SymMatrix& omega_true, double r, std::uint64_t seed);

/// Winsorized empirical CDF of one column:
///   F(x) = clamp(#{x_i <= x} / n, 1/(2n), 1 - 1/(2n)),
/// quantile = linear interpolation of the order statistics, x_(k) at level k/n.
class EmpiricalCdf final : public Marginal {
 public:
  explicit EmpiricalCdf(std::vector<double> column);
  double cdf(double x) const override;
  double quantile(double u) const override;
  bool bounded() const override { return true; }
  std::string name() const override { return "ecdf"; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf winsorized_ecdf(const Vector& column);
std::vector<MarginalPtr> winsorized_ecdfs(const Matrix& x);

/// V_hat = Phi^{-1}(F_hat(X)), U_hat = V_hat (I - r omega_hat) + Z (2rI - r^2 omega_hat)^{1/2},
/// X_hat = F_hat^{-1}(Phi(U_hat)). Every F_hat(X_ij) must lie in
/// [1/(2n), 1 - 1/(2n)], otherwise CdfRangeViolation.
KnockoffBundle nonparanormal_knockoffs(const Matrix& x, const std::vector<MarginalPtr>& cdf_hat,
                                       const SymMatrix& omega_hat, double r, std::uint64_t seed);

/// As above, and also builds the coupled perfect knockoffs from the true
/// marginals and latent precision with the same Z and r.
KnockoffBundle nonparanormal_coupled_knockoffs(const Matrix& x, const std::vector<MarginalPtr>& cdf_hat,
                                               const std::vector<MarginalPtr>& cdf_true,
                                               const SymMatrix& omega_hat, const SymMatrix& omega_true,
                                               double r, std::uint64_t seed);

}  // namespace ark
