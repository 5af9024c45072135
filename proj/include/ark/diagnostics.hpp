#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ark/linalg.hpp"

namespace ark {

/// max_j n^{-1/2} |A_j - B_j|_2.
double coupling_norm(const Matrix& a, const Matrix& b);

struct CouplingEstimate {
  double mean = 0.0;  // the reported estimate, an upper bound on the (1,2)-Wasserstein distance
  double min = 0.0;
  double max = 0.0;
  double std_error = 0.0;
  std::vector<double> norms;  // one per resample
};

/// Averages coupling_norm(X_hat, X_tilde) over independent noise draws, with
/// approximate (omega_hat) and perfect (omega_true) knockoffs sharing Z and r.
/// Resample b uses seed derive_seed(seed, {kTagResample, b}).
CouplingEstimate wasserstein_coupling_estimate(const Matrix& x, const SymMatrix& omega_hat,
                                               const SymMatrix& omega_true, double r,
                                               int resamples, std::uint64_t seed);

/// max_j (|D_hat_j| |D_j| - D_hat_j' D_j) / |D_hat_j - D_j|^2 over columns,
/// with 0/0 read as 0. Values below 1/2 satisfy the coupling condition.
double lemma2_condition_constant(const SymMatrix& d_hat, const SymMatrix& d);

/// Per-coordinate empirical KL statistic between t_nu and Gaussian fits:
///   KL_j = sum_i [ (X_ij^2 - Xh_ij^2)(nu - 2) / (2 nu)
///                  - (nu + p)/2 log(1 + X_ij^2  / (nu + |C_{i,-j}|^2))
///                  + (nu + p)/2 log(1 + Xh_ij^2 / (nu + |C_{i,-j}|^2)) ]
/// where the context C is X in the two-argument form.
Vector empirical_kl_t_vs_gaussian(const Matrix& x, const Matrix& x_hat, double nu);
Vector empirical_kl_t_vs_gaussian(const Matrix& x, const Matrix& x_hat, const Matrix& context,
                                  double nu);

struct CouplingReport {
  double norm_1_2 = 0.0;
  double wasserstein_estimate = std::numeric_limits<double>::quiet_NaN();
  double lemma2_constant = std::numeric_limits<double>::quiet_NaN();
  std::optional<Vector> kl_stats;
};

}  // namespace ark
