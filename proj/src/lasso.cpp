#include "ark/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ark {

double kkt_residual(const Vector& grad, const Vector& beta, double lambda, Eigen::Index skip) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < grad.size(); ++k) {
    if (k == skip) continue;
    const double v = beta(k) != 0.0 ? std::abs(grad(k) + lambda * (beta(k) > 0.0 ? 1.0 : -1.0))
                                    : std::max(std::abs(grad(k)) - lambda, 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

namespace {

double max_abs_coef(const Vector& b) {
  return b.size() == 0 ? 0.0 : b.cwiseAbs().maxCoeff();
}

/// Tracks the set of coordinates that have ever been nonzero.
class ActiveSet {
 public:
  explicit ActiveSet(Eigen::Index d) : member_(static_cast<std::size_t>(d), 0) {}
  void add(Eigen::Index k) {
    if (!member_[static_cast<std::size_t>(k)]) {
      member_[static_cast<std::size_t>(k)] = 1;
      items_.push_back(k);
    }
  }
  const std::vector<Eigen::Index>& items() const { return items_; }

 private:
  std::vector<char> member_;
  std::vector<Eigen::Index> items_;
};

}  // namespace

GramLassoResult gram_lasso(const Matrix& gram, const Vector& c, double lambda, const LassoOptions& opts,
                           Eigen::Index skip, const Vector* warm) {
  const Eigen::Index d = gram.rows();
  if (gram.cols() != d || c.size() != d) {
    throw Error(ErrorKind::DimensionMismatch, "Gram matrix and linear term disagree in size");
  }
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be nonnegative");

  GramLassoResult res;
  res.beta = Vector::Zero(d);
  Vector& beta = res.beta;
  Vector resid = c;  // c - G beta
  ActiveSet active(d);
  if (warm) {
    if (warm->size() != d) throw Error(ErrorKind::DimensionMismatch, "warm start has the wrong length");
    for (Eigen::Index k = 0; k < d; ++k) {
      if (k != skip && (*warm)(k) != 0.0) {
        beta(k) = (*warm)(k);
        resid.noalias() -= beta(k) * gram.col(k);
        active.add(k);
      }
    }
  }

  auto update = [&](Eigen::Index k) {
    const double gkk = gram(k, k);
    if (!(gkk > 0.0)) return 0.0;
    const double nb = soft_threshold(resid(k) + gkk * beta(k), lambda) / gkk;
    const double delta = nb - beta(k);
    if (delta != 0.0) {
      resid.noalias() -= delta * gram.col(k);
      beta(k) = nb;
      active.add(k);
    }
    return std::abs(delta);
  };

  auto refresh_residual = [&]() {
    resid = c;
    for (Eigen::Index k : active.items()) {
      if (beta(k) != 0.0) resid.noalias() -= beta(k) * gram.col(k);
    }
  };

  while (res.sweeps < opts.max_sweeps) {
    double change = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (k != skip) change = std::max(change, update(k));
    }
    ++res.sweeps;
    if (change < opts.tol * (1.0 + max_abs_coef(beta))) {
      refresh_residual();
      if (kkt_residual(-resid, beta, lambda, skip) <= opts.kkt_tol) {
        res.converged = true;
        break;
      }
      continue;
    }
    while (res.sweeps < opts.max_sweeps) {
      double inner = 0.0;
      for (Eigen::Index k : active.items()) inner = std::max(inner, update(k));
      ++res.sweeps;
      if (inner < opts.tol * (1.0 + max_abs_coef(beta))) break;
    }
  }
  refresh_residual();
  res.kkt_residual = kkt_residual(-resid, beta, lambda, skip);
  return res;
}

Standardization Standardization::fit(const Matrix& x, bool center) {
  Standardization s;
  const double n = static_cast<double>(x.rows());
  s.center = center ? Vector(x.colwise().mean().transpose()) : Vector::Zero(x.cols());
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double rms = std::sqrt((x.col(j).array() - s.center(j)).square().sum() / n);
    s.scale(j) = rms > 0.0 ? rms : 1.0;
  }
  return s;
}

Matrix Standardization::apply(const Matrix& x) const {
  return (x.rowwise() - center.transpose()) * scale.cwiseInverse().asDiagonal();
}

double logistic_loss(const Matrix& x, const Vector& y, const Vector& beta) {
  const Vector eta = x * beta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double e = eta(i);
    total += std::max(e, 0.0) + std::log1p(std::exp(-std::abs(e))) - y(i) * e;
  }
  return total / static_cast<double>(eta.size());
}

Vector logistic_gradient(const Matrix& x, const Vector& y, const Vector& beta) {
  const Vector eta = x * beta;
  const Vector prob = eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
  return x.transpose() * (prob - y) / static_cast<double>(x.rows());
}

namespace {

LassoFit fit_linear(const Matrix& xs, const Vector& y, double lambda, const LassoOptions& opts) {
  const double n = static_cast<double>(xs.rows());
  const double ybar = y.mean();
  const Matrix gram = xs.transpose() * xs / n;
  const Vector c = xs.transpose() * (y.array() - ybar).matrix() / n;
  GramLassoResult g = gram_lasso(gram, c, lambda, opts);
  LassoFit fit;
  fit.coef_std = g.beta;
  fit.coef = g.beta;
  fit.intercept = ybar;
  fit.kkt_residual = g.kkt_residual;
  fit.iterations = g.sweeps;
  fit.converged = g.converged;
  return fit;
}

double penalized_logistic(const Matrix& xs, const Vector& y, const Vector& b, double lambda) {
  return logistic_loss(xs, y, b) + lambda * b.lpNorm<1>();
}

/// Proximal Newton: each outer step minimizes the penalized quadratic model of
/// the loss by coordinate descent, then backtracks on the true objective.
LassoFit fit_logistic(const Matrix& xs, const Vector& y, double lambda, const LassoOptions& opts) {
  const Eigen::Index n = xs.rows();
  const Eigen::Index d = xs.cols();
  const double nd = static_cast<double>(n);
  constexpr int kMaxOuter = 200;

  LassoFit fit;
  Vector beta = Vector::Zero(d);
  Vector eta = Vector::Zero(n);
  int sweeps = 0;

  for (int outer = 0; outer < kMaxOuter && sweeps < opts.max_sweeps; ++outer) {
    const Vector prob = eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
    const Vector grad = xs.transpose() * (prob - y) / nd;
    fit.kkt_residual = kkt_residual(grad, beta, lambda);
    if (fit.kkt_residual <= 0.01 * opts.kkt_tol) {
      fit.converged = true;
      break;
    }
    const Vector w = prob.cwiseProduct(Vector::Ones(n) - prob).cwiseMax(1e-12);
    const Vector hdiag = (xs.array().square().colwise() * w.array()).colwise().sum().transpose() / nd;

    Vector b = beta;
    Vector rr = y - prob;  // working residual: (y - p) - W X (b - beta)
    ActiveSet active(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      if (beta(k) != 0.0) active.add(k);
    }
    auto update = [&](Eigen::Index k) {
      const double hkk = hdiag(k);
      if (!(hkk > 0.0)) return 0.0;
      const double num = xs.col(k).dot(rr) / nd + hkk * b(k);
      const double nb = soft_threshold(num, lambda) / hkk;
      const double delta = nb - b(k);
      if (delta != 0.0) {
        rr.array() -= delta * w.array() * xs.col(k).array();
        b(k) = nb;
        active.add(k);
      }
      return std::abs(delta);
    };
    while (sweeps < opts.max_sweeps) {
      double change = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) change = std::max(change, update(k));
      ++sweeps;
      if (change < opts.tol * (1.0 + max_abs_coef(b))) break;
      while (sweeps < opts.max_sweeps) {
        double inner = 0.0;
        for (Eigen::Index k : active.items()) inner = std::max(inner, update(k));
        ++sweeps;
        if (inner < opts.tol * (1.0 + max_abs_coef(b))) break;
      }
    }

    const Vector dir = b - beta;
    if (dir.cwiseAbs().maxCoeff() == 0.0) {
      // model step is stationary; the outer KKT test decides convergence
      fit.kkt_residual = kkt_residual(grad, beta, lambda);
      fit.converged = fit.kkt_residual <= opts.kkt_tol;
      break;
    }
    const double f0 = penalized_logistic(xs, y, beta, lambda);
    const double decrease = grad.dot(dir) + lambda * (b.lpNorm<1>() - beta.lpNorm<1>());
    double t = 1.0;
    Vector cand = b;
    for (int ls = 0; ls < 40; ++ls) {
      cand = beta + t * dir;
      if (penalized_logistic(xs, y, cand, lambda) <= f0 + 1e-4 * t * decrease) break;
      t *= 0.5;
    }
    beta = cand;
    eta = xs * beta;
  }

  if (!fit.converged) {
    fit.kkt_residual = kkt_residual(logistic_gradient(xs, y, beta), beta, lambda);
    fit.converged = fit.kkt_residual <= opts.kkt_tol;
  }
  fit.coef_std = beta;
  fit.coef = beta;
  fit.iterations = sweeps;
  return fit;
}

}  // namespace

LassoFit lasso_fit_standardized(const Matrix& xs, const Vector& y, double lambda, Family family,
                                const LassoOptions& opts) {
  if (xs.rows() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "design rows and response length differ");
  }
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be nonnegative");
  return family == Family::linear ? fit_linear(xs, y, lambda, opts) : fit_logistic(xs, y, lambda, opts);
}

LassoFit lasso_fit(const Matrix& design, const Vector& y, double lambda, Family family,
                   const LassoOptions& opts) {
  const Standardization st = Standardization::for_family(design, family);
  LassoFit fit = lasso_fit_standardized(st.apply(design), y, lambda, family, opts);
  fit.coef = fit.coef_std.cwiseQuotient(st.scale);
  if (family == Family::linear) fit.intercept -= st.center.dot(fit.coef);
  return fit;
}

}  // namespace ark
