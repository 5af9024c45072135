#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "ark/datagen.hpp"
#include "ark/stats.hpp"

namespace ark {

enum class Setting {
  linear_gauss_estimated,
  logistic_gauss_estimated,
  linear_t_misspec,
  logistic_t_misspec,
  custom,
};
std::string to_string(Setting s);
Setting setting_from_string(const std::string& s);

/// Feature law. banded: N(0, Omega^{-1}) with omega_ij = 0.2^|i-j| for
/// |i-j| < 10; ar: N(0, Sigma) with sigma_ij = rho^|i-j|; t_ar: t_nu with
/// scale matrix Sigma = AR(rho).
enum class FeatureModel { banded, ar, t_ar };
std::string to_string(FeatureModel f);
FeatureModel feature_model_from_string(const std::string& s);

/// How the knockoff working model is obtained in each replication.
/// shrinkage: in-sample shrinkage covariance of the replication's own X;
/// oracle: the true covariance; moment_matched: N(0, nu/(nu-2) Sigma) for t features.
enum class Estimation { shrinkage, oracle, moment_matched };
std::string to_string(Estimation e);
Estimation estimation_from_string(const std::string& s);

struct KfwerSpec {
  int k = 1;
  double q = 0.1;
};

struct SimConfig {
  Setting setting = Setting::linear_gauss_estimated;
  Family family = Family::linear;
  FeatureModel features = FeatureModel::banded;
  Estimation estimation = Estimation::shrinkage;
  StatMethod statistic = StatMethod::rcd_debiased;
  long n = 250;
  long p = 400;
  long replications = 100;
  long k_nonzero = 50;
  double magnitude = 3.0;
  double q = 0.2;
  double ar_rho = 0.5;
  std::optional<double> nu;
  std::uint64_t seed = 1;
  bool fixed_beta = true;
  int offset = 0;
  std::optional<KfwerSpec> kfwer;
  LambdaRule lambda;
  int threads = 1;

  /// Throws ConfigError when an invariant fails.
  void validate() const;
};

/// Defaults for a named setting.
SimConfig preset(Setting s);

/// Parses `key = value` lines ('#' starts a comment, strings may be quoted).
/// `setting` is applied first so that other keys override its defaults.
/// Unknown keys and malformed values throw ConfigError.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

/// Flat key -> value rendering, the inverse of parse_config.
std::map<std::string, std::string> config_entries(const SimConfig& c);
std::string render_config(const SimConfig& c);

}  // namespace ark
