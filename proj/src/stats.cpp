#include "ark/stats.hpp"

#include <limits>
#include <cmath>
#include <vector>

namespace ark {

AugmentedDesign AugmentedDesign::from(const Matrix& x, const Matrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "X and its knockoff matrix differ in shape");
  }
  AugmentedDesign d;
  d.cols.resize(x.rows(), 2 * x.cols());
  d.cols << x, x_hat;
  return d;
}

AugmentedDesign AugmentedDesign::swapped(Eigen::Index j) const {
  AugmentedDesign d = *this;
  d.cols.col(j).swap(d.cols.col(j + p()));
  return d;
}

std::string to_string(StatMethod m) {
  switch (m) {
    case StatMethod::marginal_corr: return "marginal_corr";
    case StatMethod::rcd_lasso: return "rcd_lasso";
    case StatMethod::rcd_debiased: return "rcd_debiased";
    case StatMethod::rcd_debiased_glm: return "rcd_debiased_glm";
  }
  return "unknown";
}

StatMethod stat_method_from_string(const std::string& s) {
  if (s == "marginal_corr") return StatMethod::marginal_corr;
  if (s == "rcd_lasso") return StatMethod::rcd_lasso;
  if (s == "rcd_debiased") return StatMethod::rcd_debiased;
  if (s == "rcd_debiased_glm") return StatMethod::rcd_debiased_glm;
  throw Error(ErrorKind::InvalidArgument, "unknown statistic '" + s + "'");
}

StatVector marginal_corr_stats(const Matrix& x, const Matrix& x_hat, const Vector& y) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols() || x.rows() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "X, X_hat and y shapes disagree");
  }
  const double ynorm = y.norm();
  if (!(ynorm > 0.0)) throw Error(ErrorKind::ZeroResponse, "response vector is zero");
  const double scale = 1.0 / (std::sqrt(static_cast<double>(y.size())) * ynorm);
  StatVector s;
  s.method = StatMethod::marginal_corr;
  s.w = scale * ((x.transpose() * y).cwiseAbs() - (x_hat.transpose() * y).cwiseAbs());
  return s;
}

StatVector rcd_stats(const Vector& beta_aug, StatMethod method) {
  if (beta_aug.size() % 2 != 0) {
    throw Error(ErrorKind::DimensionMismatch, "augmented coefficient vector must have even length");
  }
  const Eigen::Index p = beta_aug.size() / 2;
  StatVector s;
  s.method = method;
  s.w = beta_aug.head(p).cwiseAbs() - beta_aug.tail(p).cwiseAbs();
  return s;
}

namespace {

/// cols * beta for a sparse beta.
Vector sparse_product(const Matrix& cols, const Vector& beta) {
  Vector out = Vector::Zero(cols.rows());
  for (Eigen::Index k = 0; k < beta.size(); ++k) {
    if (beta(k) != 0.0) out.noalias() += beta(k) * cols.col(k);
  }
  return out;
}

void check_rows(const AugmentedDesign& design, const Vector& y) {
  if (design.n() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "design rows and response length differ");
  }
}

}  // namespace

NodewiseScore nodewise_score(const AugmentedDesign& design, Eigen::Index j, double lambda_j,
                             const LassoOptions& opts) {
  const Matrix& cols = design.cols;
  if (j < 0 || j >= cols.cols()) throw Error(ErrorKind::InvalidArgument, "column out of range", j);
  const double n = static_cast<double>(cols.rows());
  const Matrix gram = cols.transpose() * cols / n;
  GramLassoResult fit = gram_lasso(gram, gram.col(j), lambda_j, opts, j);
  if (!fit.converged) throw Error(ErrorKind::NoConvergence, "nodewise Lasso did not converge", j);
  NodewiseScore s;
  s.gamma = std::move(fit.beta);
  s.z = cols.col(j) - sparse_product(cols, s.gamma);
  s.kkt_residual = fit.kkt_residual;
  s.converged = fit.converged;
  if (std::abs(s.z.dot(cols.col(j))) < 1e-10 * n) {
    throw Error(ErrorKind::DegenerateScore, "score vector is orthogonal to its column", j);
  }
  return s;
}

DebiasedFit debiased_lasso(const AugmentedDesign& design, const Vector& y, double lambda,
                           double lambda_j, const LassoOptions& opts) {
  check_rows(design, y);
  const Standardization st = Standardization::fit(design.cols);
  const Matrix xs = st.apply(design.cols);
  const Eigen::Index d = xs.cols();
  const double n = static_cast<double>(xs.rows());
  const Vector yc = (y.array() - y.mean()).matrix();
  const Matrix gram = xs.transpose() * xs / n;

  GramLassoResult init = gram_lasso(gram, xs.transpose() * yc / n, lambda, opts);
  if (!init.converged) throw Error(ErrorKind::NoConvergence, "initial Lasso did not converge");
  const Vector resid = yc - sparse_product(xs, init.beta);

  DebiasedFit out;
  out.lambda = lambda;
  out.lambda_j = lambda_j;
  out.max_kkt_residual = init.kkt_residual;
  out.fits = 1;
  Vector corrected(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    GramLassoResult nw = gram_lasso(gram, gram.col(j), lambda_j, opts, j);
    if (!nw.converged) throw Error(ErrorKind::NoConvergence, "nodewise Lasso did not converge", j);
    out.max_kkt_residual = std::max(out.max_kkt_residual, nw.kkt_residual);
    ++out.fits;
    const Vector z = xs.col(j) - sparse_product(xs, nw.beta);
    const double denom = z.dot(xs.col(j));
    if (std::abs(denom) < 1e-10 * n) {
      throw Error(ErrorKind::DegenerateScore, "score vector is orthogonal to its column", j);
    }
    corrected(j) = init.beta(j) + z.dot(resid) / denom;
  }
  out.coef = corrected.cwiseQuotient(st.scale);
  out.init = init.beta.cwiseQuotient(st.scale);
  return out;
}

GlmTerms glm_terms(const Vector& eta, const Vector& y, Family family) {
  if (eta.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "eta and y lengths differ");
  // rho(y; a) = -y a + b(a): rho_dot = b'(a) - y, D = b''(a)
  GlmTerms t;
  t.rho_dot.resize(eta.size());
  t.weight.resize(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (family == Family::linear) {
      t.rho_dot(i) = eta(i) - y(i);
      t.weight(i) = 1.0;
    } else {
      const double e = std::exp(-std::abs(eta(i)));
      const double prob = eta(i) >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      t.rho_dot(i) = prob - y(i);
      t.weight(i) = e / ((1.0 + e) * (1.0 + e));
    }
  }
  return t;
}

DebiasedFit glm_debiased(const AugmentedDesign& design, const Vector& y, double lambda,
                         double lambda_j, Family family, const LassoOptions& opts) {
  check_rows(design, y);
  const Standardization st = Standardization::for_family(design.cols, family);
  const Matrix xs = st.apply(design.cols);
  const Eigen::Index d = xs.cols();
  const Eigen::Index n = xs.rows();
  const double nd = static_cast<double>(n);

  const LassoFit fit = lasso_fit_standardized(xs, y, lambda, family, opts);
  if (!fit.converged) throw Error(ErrorKind::NoConvergence, "initial GLM Lasso did not converge");
  const Vector eta = sparse_product(xs, fit.coef_std).array() + fit.intercept;

  const GlmTerms terms = glm_terms(eta, y, family);
  const Vector& rho_dot = terms.rho_dot;
  const Vector& weight = terms.weight;
  const Matrix weighted_gram = xs.transpose() * weight.asDiagonal() * xs / nd;
  const Vector score = xs.transpose() * rho_dot / nd;

  DebiasedFit out;
  out.lambda = lambda;
  out.lambda_j = lambda_j;
  out.max_kkt_residual = fit.kkt_residual;
  out.fits = 1;
  Vector corrected(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    GramLassoResult nw = gram_lasso(weighted_gram, weighted_gram.col(j), lambda_j, opts, j);
    if (!nw.converged) throw Error(ErrorKind::NoConvergence, "nodewise Lasso did not converge", j);
    out.max_kkt_residual = std::max(out.max_kkt_residual, nw.kkt_residual);
    ++out.fits;
    const double tau2 = weighted_gram(j, j) - weighted_gram.col(j).dot(nw.beta);
    if (!(tau2 > 1e-10)) {
      throw Error(ErrorKind::DegenerateTau, "tau_j^2 = " + std::to_string(tau2), j);
    }
    corrected(j) = fit.coef_std(j) - (score(j) - nw.beta.dot(score)) / tau2;
  }
  out.coef = corrected.cwiseQuotient(st.scale);
  out.init = fit.coef_std.cwiseQuotient(st.scale);
  return out;
}

double lambda_rate(Eigen::Index n, Eigen::Index p) {
  return std::sqrt(std::log(2.0 * static_cast<double>(p)) / static_cast<double>(n));
}

NoiseEstimate estimate_noise_sd(const Matrix& design, const Vector& y, const LassoOptions& opts,
                                int folds, int path_length) {
  if (design.rows() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "design rows and response length differ");
  }
  if (folds < 2 || path_length < 2) throw Error(ErrorKind::InvalidArgument, "need folds >= 2 and a path");
  const Standardization st = Standardization::fit(design);
  const Matrix xs = st.apply(design);
  const Eigen::Index n = xs.rows();
  const double nd = static_cast<double>(n);
  const Vector yc = (y.array() - y.mean()).matrix();
  const Matrix gram = xs.transpose() * xs / nd;
  const Vector c = xs.transpose() * yc / nd;
  const double lambda_max = c.cwiseAbs().maxCoeff();
  NoiseEstimate out;
  out.sigma = yc.norm() / std::sqrt(std::max(nd - 1.0, 1.0));
  if (!(lambda_max > 0.0)) return out;
  auto certify = [&](GramLassoResult fit) {
    if (!fit.converged) throw Error(ErrorKind::NoConvergence, "Lasso on the cv path did not converge");
    out.max_kkt_residual = std::max(out.max_kkt_residual, fit.kkt_residual);
    ++out.fits;
    return std::move(fit.beta);
  };

  const double ratio = n < xs.cols() ? 0.01 : 1e-4;
  std::vector<double> lambdas(static_cast<std::size_t>(path_length));
  for (int k = 0; k < path_length; ++k) {
    lambdas[static_cast<std::size_t>(k)] =
        lambda_max * std::pow(ratio, static_cast<double>(k) / (path_length - 1));
  }

  struct Fold {
    Matrix gram;
    Vector c;
    Matrix xv;
    Vector yv;
    Vector warm;
    Eigen::Index size = 0;
  };
  std::vector<Fold> fs(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i) (i % folds == f ? test : train).push_back(i);
    const Matrix xv_raw = xs(test, Eigen::all);
    const Vector yv_raw = yc(test);
    const double nt = static_cast<double>(train.size());
    // training moments from the full-data Gram minus the held-out rows
    const Vector sum_x = xs.colwise().sum().transpose() - xv_raw.colwise().sum().transpose();
    const Vector mean_x = sum_x / nt;
    const double mean_y = -yv_raw.sum() / nt;
    Fold& fold = fs[static_cast<std::size_t>(f)];
    fold.gram = (nd * gram - xv_raw.transpose() * xv_raw) / nt - mean_x * mean_x.transpose();
    fold.c = (nd * c - xv_raw.transpose() * yv_raw) / nt - mean_x * mean_y;
    fold.xv = xv_raw.rowwise() - mean_x.transpose();
    fold.yv = (yv_raw.array() - mean_y).matrix();
    fold.warm = Vector::Zero(xs.cols());
    fold.size = static_cast<Eigen::Index>(train.size());
  }

  // tuning fits: looser sweep tolerance, same KKT certificate
  LassoOptions cv_opts = opts;
  cv_opts.tol = std::max(opts.tol, 1e-5);

  // walk the path until the cv error has clearly turned upward
  constexpr int patience = 5;
  double best_error = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  int since_best = 0;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    double error = 0.0;
    bool saturated = false;
    for (Fold& fold : fs) {
      fold.warm = certify(gram_lasso(fold.gram, fold.c, lambdas[k], cv_opts, -1, &fold.warm));
      error += (fold.yv - sparse_product(fold.xv, fold.warm)).squaredNorm();
      if ((fold.warm.array() != 0.0).count() + 1 >= fold.size) saturated = true;
    }
    if (error < best_error) {
      best_error = error;
      best_k = k;
      since_best = 0;
    } else if (++since_best >= patience) {
      break;
    }
    if (saturated) break;
  }

  Vector beta = Vector::Zero(xs.cols());
  for (std::size_t k = 0; k < best_k; ++k) beta = certify(gram_lasso(gram, c, lambdas[k], cv_opts, -1, &beta));
  beta = certify(gram_lasso(gram, c, lambdas[best_k], opts, -1, &beta));
  const auto support = (beta.array() != 0.0).count();
  if (support + 1 >= n) return out;
  const double rss = (yc - sparse_product(xs, beta)).squaredNorm();
  out.sigma = std::sqrt(rss / static_cast<double>(n - support - 1));
  return out;
}

StatResult knockoff_statistics(StatMethod method, const Matrix& x, const Matrix& x_hat,
                               const Vector& y, Family family, const LambdaRule& rule,
                               const LassoOptions& opts) {
  StatResult out;
  if (method == StatMethod::marginal_corr) {
    out.stats = marginal_corr_stats(x, x_hat, y);
    return out;
  }
  const AugmentedDesign design = AugmentedDesign::from(x, x_hat);
  const double rate = lambda_rate(x.rows(), x.cols());
  const double lambda_j = rule.nodewise_const * rate;
  double lambda = rule.logistic_const * rate;
  double tuning_kkt = 0.0;
  if (family == Family::linear) {
    const NoiseEstimate noise = estimate_noise_sd(design.cols, y, opts);
    out.sigma_hat = noise.sigma;
    tuning_kkt = noise.max_kkt_residual;
    lambda = rule.linear_const * out.sigma_hat * rate;
  }

  if (method == StatMethod::rcd_lasso) {
    const LassoFit fit = lasso_fit(design.cols, y, lambda, family, opts);
    if (!fit.converged) throw Error(ErrorKind::NoConvergence, "Lasso did not converge");
    out.stats = rcd_stats(fit.coef, method);
    out.stats.lambda = lambda;
    out.max_kkt_residual = std::max(fit.kkt_residual, tuning_kkt);
    out.fits = 1;
    return out;
  }

  const bool use_glm = method == StatMethod::rcd_debiased_glm || family == Family::logistic;
  const DebiasedFit fit = use_glm ? glm_debiased(design, y, lambda, lambda_j, family, opts)
                                  : debiased_lasso(design, y, lambda, lambda_j, opts);
  out.stats = rcd_stats(fit.coef, use_glm ? StatMethod::rcd_debiased_glm : StatMethod::rcd_debiased);
  out.stats.lambda = lambda;
  out.stats.lambda_j = lambda_j;
  out.max_kkt_residual = std::max(fit.max_kkt_residual, tuning_kkt);
  out.fits = fit.fits;
  return out;
}

}  // namespace ark
