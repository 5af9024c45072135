#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ark/linalg.hpp"

namespace ark {

enum class Family { linear, logistic };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct GroundTruth {
  Vector beta;
  std::vector<Eigen::Index> support;  // H1, ascending
  std::vector<Eigen::Index> nulls;    // H0, ascending

  static GroundTruth from_beta(Vector beta);
  Eigen::Index p() const { return beta.size(); }
};

/// k positions drawn uniformly without replacement, each coefficient
/// +magnitude or -magnitude with probability 1/2.
GroundTruth make_truth(Eigen::Index p, Eigen::Index k_nonzero, double magnitude, std::uint64_t seed);

/// n x p matrix of i.i.d. N(0,1); column j comes from stream derive_seed(seed, {j}).
Matrix standard_normal_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed);

/// Draws rows N(0, sigma) as Z L^T with L the lower Cholesky factor. Since L is
/// lower triangular, column j only depends on noise columns 0..j.
class GaussianSampler {
 public:
  explicit GaussianSampler(const SymMatrix& sigma);
  Matrix draw(Eigen::Index n, std::uint64_t seed) const;
  Eigen::Index dim() const { return lower_.rows(); }

 private:
  Matrix lower_;
};

Matrix sample_gaussian(Eigen::Index n, const SymMatrix& sigma, std::uint64_t seed);

/// Multivariate t draw kept in its scale-mixture form: row i of x equals
/// eta_i / sqrt(q_i / nu) with eta_i ~ N(0, scale) and q_i ~ chi^2_nu.
struct TSample {
  Matrix x;
  Matrix eta;
  Vector q;
  double nu = 0.0;

  Matrix reassemble() const;
  bool has_latents() const { return q.size() == x.rows() && eta.rows() == x.rows(); }
};

/// t_nu(0, scale) sampler; the scale matrix is Omega^{-1}.
class TSampler {
 public:
  TSampler(const SymMatrix& scale, double nu);
  TSample draw(Eigen::Index n, std::uint64_t seed) const;
  double nu() const { return nu_; }

 private:
  GaussianSampler gaussian_;
  double nu_;
};

/// Takes the precision Omega (scale = Omega^{-1}). Throws InvalidNu for nu <= 2.
TSample sample_t(Eigen::Index n, const SymMatrix& omega, double nu, std::uint64_t seed);

/// y = X beta + N(0,1) noise (linear) or Bernoulli(1 / (1 + exp(-x_i^T beta)))
/// without intercept (logistic).
Vector sample_response(const Matrix& x, const GroundTruth& truth, Family family, std::uint64_t seed);

/// Continuous, strictly increasing marginal CDF with its quantile function.
class Marginal {
 public:
  virtual ~Marginal() = default;
  virtual double cdf(double x) const = 0;
  virtual double quantile(double u) const = 0;
  virtual bool bounded() const = 0;
  virtual std::string name() const = 0;
};

using MarginalPtr = std::shared_ptr<const Marginal>;

class StandardNormalMarginal final : public Marginal {
 public:
  double cdf(double x) const override;
  double quantile(double u) const override;
  bool bounded() const override { return false; }
  std::string name() const override { return "normal(0,1)"; }
};

class UniformMarginal final : public Marginal {
 public:
  UniformMarginal(double lo = 0.0, double hi = 1.0);
  double cdf(double x) const override;
  double quantile(double u) const override;
  bool bounded() const override { return true; }
  std::string name() const override;

 private:
  double lo_, hi_;
};

/// Beta(a, b) stretched onto [lo, hi].
class ScaledBetaMarginal final : public Marginal {
 public:
  ScaledBetaMarginal(double a, double b, double lo, double hi);
  double cdf(double x) const override;
  double quantile(double u) const override;
  bool bounded() const override { return true; }
  std::string name() const override;

 private:
  double a_, b_, lo_, hi_;
};

double normal_cdf(double x);
double normal_quantile(double u);

struct NonparanormalSample {
  Matrix x;
  Matrix latent;  // V with rows N(0, R), R the correlation matrix of Omega^{-1}
  bool has_unbounded_marginal = false;
};

/// X_ij = F_j^{-1}(Phi(V_ij)). Omega^{-1} is rescaled to unit diagonal first.
/// Unbounded marginals are accepted and flagged unless require_bounded is set,
/// in which case they throw UnboundedMarginal.
NonparanormalSample sample_nonparanormal(Eigen::Index n, const SymMatrix& omega,
                                         const std::vector<MarginalPtr>& marginals,
                                         std::uint64_t seed, bool require_bounded = false);

}  // namespace ark
