#include "ark/simulation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <mutex>
#include <thread>

#include "ark/rng.hpp"
#include "ark/stats.hpp"

namespace ark {

namespace {

constexpr double kBandBase = 0.2;
constexpr Eigen::Index kBandWidth = 10;

GroundTruth draw_truth(const SimConfig& c, std::uint64_t seed) {
  return make_truth(c.p, c.k_nonzero, c.magnitude, derive_seed(seed, {kTagTruth}));
}

}  // namespace

Design Design::build(const SimConfig& config) {
  config.validate();
  Design d;
  if (config.features == FeatureModel::banded) {
    d.omega = build_banded_precision(config.p, kBandBase, kBandWidth);
    d.sigma = sym_inverse(d.omega);
  } else {
    d.sigma = build_ar_covariance(config.p, config.ar_rho);
    d.omega = sym_inverse(d.sigma);
  }
  if (config.estimation == Estimation::oracle) {
    // for t features the true covariance is nu/(nu-2) times the scale matrix
    const double c = config.features == FeatureModel::t_ar ? *config.nu / (*config.nu - 2.0) : 1.0;
    d.fixed_model = WorkingModel::from_covariance(d.sigma.scaled(c));
  } else if (config.estimation == Estimation::moment_matched) {
    d.fixed_model = WorkingModel::from_covariance(d.sigma.scaled(*config.nu / (*config.nu - 2.0)));
  }
  if (config.fixed_beta) d.fixed_truth = draw_truth(config, config.seed);
  return d;
}

std::uint64_t replication_seed(const SimConfig& config, long rep) {
  return derive_seed(config.seed, {kTagReplication, static_cast<std::uint64_t>(rep)});
}

ReplicationResult run_replication(const SimConfig& config, const Design& design, long rep) {
  const std::uint64_t seed = replication_seed(config, rep);
  const GroundTruth truth = design.fixed_truth ? *design.fixed_truth : draw_truth(config, seed);

  const std::uint64_t feature_seed = derive_seed(seed, {kTagFeatures});
  Matrix x;
  if (config.features == FeatureModel::t_ar) {
    x = sample_t(config.n, design.omega, *config.nu, feature_seed).x;
  } else {
    x = sample_gaussian(config.n, design.sigma, feature_seed);
  }
  const Vector y = sample_response(x, truth, config.family, derive_seed(seed, {kTagResponse}));

  std::optional<WorkingModel> estimated;
  if (!design.fixed_model) {
    estimated = WorkingModel::from_covariance(shrinkage_covariance(x).sigma);
  }
  const WorkingModel& model = design.fixed_model ? *design.fixed_model : *estimated;
  const KnockoffBundle ko = gaussian_knockoffs(x, model, derive_seed(seed, {kTagKnockoffs}));

  const StatResult stats =
      knockoff_statistics(config.statistic, x, ko.x_hat, y, config.family, config.lambda);
  const SelectionOutcome sel = config.kfwer
                                   ? kfwer_threshold(stats.stats.w, config.kfwer->k, config.kfwer->q)
                                   : fdr_threshold(stats.stats.w, config.q, config.offset);
  const Score sc = score(sel, truth);

  ReplicationResult r;
  r.rep = rep;
  r.fdp = sc.fdp;
  r.power = sc.power;
  r.n_selected = static_cast<long>(sel.selected.size());
  for (Eigen::Index j : sel.selected) {
    if (truth.beta(j) == 0.0) ++r.n_false;
  }
  r.threshold = sel.threshold;
  r.max_kkt_residual = stats.max_kkt_residual;
  r.fits = stats.fits;
  return r;
}

ReplicationResult run_replication(const SimConfig& config, long rep) {
  return run_replication(config, Design::build(config), rep);
}

void aggregate(SimReport& report) {
  const auto m = static_cast<double>(report.rows.size());
  report.fdr = 0.0;
  report.power = 0.0;
  report.mcse = 0.0;
  report.max_kkt_residual = 0.0;
  report.total_fits = 0;
  report.kfwer_rate.reset();
  if (report.rows.empty()) return;
  long hits = 0;
  for (const auto& r : report.rows) {
    report.fdr += r.fdp;
    report.power += r.power;
    report.max_kkt_residual = std::max(report.max_kkt_residual, r.max_kkt_residual);
    report.total_fits += r.fits;
    if (report.config.kfwer && r.n_false >= report.config.kfwer->k) ++hits;
  }
  report.fdr /= m;
  report.power /= m;
  if (report.rows.size() > 1) {
    double ss = 0.0;
    for (const auto& r : report.rows) ss += (r.fdp - report.fdr) * (r.fdp - report.fdr);
    report.mcse = std::sqrt(ss / (m - 1.0) / m);
  }
  if (report.config.kfwer) report.kfwer_rate = static_cast<double>(hits) / m;
}

SimReport run_simulation(const SimConfig& config, bool quiet) {
  const auto start = std::chrono::steady_clock::now();
  const Design design = Design::build(config);
  const auto reps = static_cast<std::size_t>(config.replications);

  std::vector<std::optional<ReplicationResult>> results(reps);
  std::vector<std::optional<ReplicationFailure>> failed(reps);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&]() {
    for (std::size_t i = next++; i < reps; i = next++) {
      const long rep = static_cast<long>(i);
      try {
        results[i] = run_replication(config, design, rep);
      } catch (const Error& e) {
        failed[i] = ReplicationFailure{rep, e.kind(), e.what()};
        if (!quiet) {
          std::lock_guard<std::mutex> lock(log_mutex);
          std::cerr << "warning: replication " << rep << " failed (" << to_string(e.kind())
                    << "): " << e.what() << "\n";
        }
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, config.threads));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(n_threads, reps); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SimReport report;
  report.config = config;
  for (std::size_t i = 0; i < reps; ++i) {
    if (results[i]) report.rows.push_back(*results[i]);
    if (failed[i]) report.failures.push_back(*failed[i]);
  }
  if (report.rows.empty()) {
    throw Error(ErrorKind::AllReplicationsFailed,
                "all " + std::to_string(reps) + " replications failed");
  }
  aggregate(report);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace ark
