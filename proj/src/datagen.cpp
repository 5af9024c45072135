#include "ark/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

#include "ark/rng.hpp"

namespace ark {

std::string to_string(Family f) {
  return f == Family::linear ? "linear" : "logistic";
}

Family family_from_string(const std::string& s) {
  if (s == "linear") return Family::linear;
  if (s == "logistic") return Family::logistic;
  throw Error(ErrorKind::InvalidArgument, "unknown model family '" + s + "'");
}

GroundTruth GroundTruth::from_beta(Vector beta) {
  GroundTruth t;
  t.beta = std::move(beta);
  for (Eigen::Index j = 0; j < t.beta.size(); ++j) {
    (t.beta(j) != 0.0 ? t.support : t.nulls).push_back(j);
  }
  return t;
}

GroundTruth make_truth(Eigen::Index p, Eigen::Index k_nonzero, double magnitude, std::uint64_t seed) {
  if (p < 0 || k_nonzero < 0 || k_nonzero > p) {
    throw Error(ErrorKind::InvalidArgument, "need 0 <= k_nonzero <= p");
  }
  Rng rng(seed);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  // partial Fisher-Yates
  for (Eigen::Index i = 0; i < k_nonzero; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, p - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng.engine()))]);
  }
  Vector beta = Vector::Zero(p);
  for (Eigen::Index i = 0; i < k_nonzero; ++i) {
    beta(idx[static_cast<std::size_t>(i)]) = rng.uniform() < 0.5 ? -magnitude : magnitude;
  }
  return GroundTruth::from_beta(std::move(beta));
}

Matrix standard_normal_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  Matrix z(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(j)}));
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = rng.normal();
  }
  return z;
}

GaussianSampler::GaussianSampler(const SymMatrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPSD, "covariance is not positive definite");
  }
  lower_ = llt.matrixL();
}

Matrix GaussianSampler::draw(Eigen::Index n, std::uint64_t seed) const {
  const Matrix z = standard_normal_matrix(n, lower_.rows(), seed);
  return z * lower_.transpose();
}

Matrix sample_gaussian(Eigen::Index n, const SymMatrix& sigma, std::uint64_t seed) {
  return GaussianSampler(sigma).draw(n, seed);
}

Matrix TSample::reassemble() const {
  Matrix out = eta;
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) /= std::sqrt(q(i) / nu);
  return out;
}

TSampler::TSampler(const SymMatrix& scale, double nu) : gaussian_(scale), nu_(nu) {
  if (!(nu > 2.0)) {
    throw Error(ErrorKind::InvalidNu, "degrees of freedom must exceed 2");
  }
}

TSample TSampler::draw(Eigen::Index n, std::uint64_t seed) const {
  TSample s;
  s.nu = nu_;
  s.eta = gaussian_.draw(n, seed);
  s.q.resize(n);
  Rng rng(derive_seed(seed, {kTagLatentChi}));
  for (Eigen::Index i = 0; i < n; ++i) s.q(i) = rng.chi_squared(nu_);
  s.x = s.reassemble();
  return s;
}

TSample sample_t(Eigen::Index n, const SymMatrix& omega, double nu, std::uint64_t seed) {
  if (!(nu > 2.0)) {
    throw Error(ErrorKind::InvalidNu, "degrees of freedom must exceed 2");
  }
  return TSampler(sym_inverse(omega), nu).draw(n, seed);
}

Vector sample_response(const Matrix& x, const GroundTruth& truth, Family family, std::uint64_t seed) {
  if (x.cols() != truth.beta.size()) {
    throw Error(ErrorKind::DimensionMismatch, "design has " + std::to_string(x.cols()) +
                                                  " columns but beta has " +
                                                  std::to_string(truth.beta.size()));
  }
  const Vector eta = x * truth.beta;
  Rng rng(seed);
  Vector y(x.rows());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (family == Family::linear) {
      y(i) = eta(i) + rng.normal();
    } else {
      const double prob = 1.0 / (1.0 + std::exp(-eta(i)));
      y(i) = rng.uniform() < prob ? 1.0 : 0.0;
    }
  }
  return y;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double u) {
  if (u <= 0.0) return -std::numeric_limits<double>::infinity();
  if (u >= 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

double StandardNormalMarginal::cdf(double x) const { return normal_cdf(x); }
double StandardNormalMarginal::quantile(double u) const { return normal_quantile(u); }

UniformMarginal::UniformMarginal(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(hi > lo)) throw Error(ErrorKind::InvalidArgument, "uniform marginal needs hi > lo");
}

double UniformMarginal::cdf(double x) const {
  return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0);
}

double UniformMarginal::quantile(double u) const {
  return lo_ + std::clamp(u, 0.0, 1.0) * (hi_ - lo_);
}

std::string UniformMarginal::name() const {
  return "uniform(" + std::to_string(lo_) + "," + std::to_string(hi_) + ")";
}

ScaledBetaMarginal::ScaledBetaMarginal(double a, double b, double lo, double hi)
    : a_(a), b_(b), lo_(lo), hi_(hi) {
  if (!(a > 0.0 && b > 0.0 && hi > lo)) {
    throw Error(ErrorKind::InvalidArgument, "scaled beta marginal needs a, b > 0 and hi > lo");
  }
}

double ScaledBetaMarginal::cdf(double x) const {
  const double t = (x - lo_) / (hi_ - lo_);
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return boost::math::cdf(boost::math::beta_distribution<double>(a_, b_), t);
}

double ScaledBetaMarginal::quantile(double u) const {
  if (u <= 0.0) return lo_;
  if (u >= 1.0) return hi_;
  return lo_ + (hi_ - lo_) * boost::math::quantile(boost::math::beta_distribution<double>(a_, b_), u);
}

std::string ScaledBetaMarginal::name() const {
  return "beta(" + std::to_string(a_) + "," + std::to_string(b_) + ") on [" + std::to_string(lo_) +
         "," + std::to_string(hi_) + "]";
}

NonparanormalSample sample_nonparanormal(Eigen::Index n, const SymMatrix& omega,
                                         const std::vector<MarginalPtr>& marginals,
                                         std::uint64_t seed, bool require_bounded) {
  const Eigen::Index p = omega.dim();
  if (static_cast<Eigen::Index>(marginals.size()) != p) {
    throw Error(ErrorKind::DimensionMismatch, "need one marginal per column");
  }
  NonparanormalSample out;
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& m = marginals[static_cast<std::size_t>(j)];
    if (!m) throw Error(ErrorKind::InvalidArgument, "null marginal", j);
    if (!m->bounded()) {
      if (require_bounded) {
        throw Error(ErrorKind::UnboundedMarginal, "marginal " + m->name() + " has unbounded support", j);
      }
      out.has_unbounded_marginal = true;
    }
  }
  const Matrix sigma = sym_inverse(omega).matrix();
  const Vector inv_sd = sigma.diagonal().cwiseSqrt().cwiseInverse();
  const SymMatrix corr(inv_sd.asDiagonal() * sigma * inv_sd.asDiagonal());

  out.latent = sample_gaussian(n, corr, seed);
  out.x.resize(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& m = *marginals[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) out.x(i, j) = m.quantile(normal_cdf(out.latent(i, j)));
  }
  return out;
}

}  // namespace ark
