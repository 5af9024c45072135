#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ark/config.hpp"
#include "ark/datagen.hpp"
#include "ark/knockoffs.hpp"
#include "ark/selection.hpp"

namespace ark {

struct ReplicationResult {
  long rep = 0;
  double fdp = 0.0;
  double power = 0.0;
  long n_selected = 0;
  long n_false = 0;
  double threshold = 0.0;
  double max_kkt_residual = 0.0;
  int fits = 0;
};

struct ReplicationFailure {
  long rep = 0;
  ErrorKind kind = ErrorKind::NoConvergence;
  std::string message;
};

struct SimReport {
  SimConfig config;
  std::vector<ReplicationResult> rows;  // successful replications, ordered by rep
  std::vector<ReplicationFailure> failures;
  double fdr = 0.0;    // mean fdp over rows
  double power = 0.0;  // mean power over rows
  double mcse = 0.0;   // standard error of fdr
  /// With a k-FWER rule: fraction of rows with at least k false discoveries.
  std::optional<double> kfwer_rate;
  double max_kkt_residual = 0.0;
  long total_fits = 0;
  double wall_seconds = 0.0;

  long successes() const { return static_cast<long>(rows.size()); }
};

/// Fixed pieces of a simulation design shared by every replication.
struct Design {
  SymMatrix sigma;  // feature covariance (scale matrix for t features)
  SymMatrix omega;  // its inverse
  std::optional<WorkingModel> fixed_model;  // set unless the model is estimated per replication
  std::optional<GroundTruth> fixed_truth;

  static Design build(const SimConfig& config);
};

/// Seed of replication `rep`: derive_seed(config.seed, {kTagReplication, rep}).
std::uint64_t replication_seed(const SimConfig& config, long rep);

/// Sample data, fit the working model, build knockoffs, compute statistics,
/// threshold and score. Deterministic in (config.seed, rep).
ReplicationResult run_replication(const SimConfig& config, const Design& design, long rep);
ReplicationResult run_replication(const SimConfig& config, long rep);

/// Runs every replication on config.threads workers. Replications that throw
/// are recorded as failures (with a warning on stderr) and excluded from the
/// aggregates. Throws AllReplicationsFailed if none succeeds.
SimReport run_simulation(const SimConfig& config, bool quiet = false);

/// Recomputes fdr, power, mcse and kfwer_rate from rows.
void aggregate(SimReport& report);

}  // namespace ark
