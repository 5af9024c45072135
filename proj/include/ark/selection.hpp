#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ark/datagen.hpp"
#include "ark/linalg.hpp"

namespace ark {

enum class SelectionRule { fdr, kfwer };
std::string to_string(SelectionRule r);

struct SelectionOutcome {
  double threshold = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> selected;  // 0-based, ascending; exactly {j : w_j >= threshold}
  SelectionRule rule = SelectionRule::fdr;
  double q = 0.0;
  int k = 0;       // k-FWER only
  int v = 0;       // k-FWER only
  int offset = 0;  // FDR only
};

/// Candidate thresholds {|w_j| : w_j != 0}, ascending and deduplicated.
std::vector<double> candidate_thresholds(const Vector& w);

/// T = min{t : (offset + #{w_j <= -t}) / max(#{w_j >= t}, 1) <= q}; +inf if no
/// candidate qualifies.
SelectionOutcome fdr_threshold(const Vector& w, double q, int offset = 0);

/// P(L >= k) for L ~ NB(v, 1/2) (failures before the v-th success).
double negative_binomial_tail(int v, int k);

/// Largest v >= 0 with P(L_v >= k) <= q.
int kfwer_v(int k, double q);

/// T_v = largest candidate t with #{j : -w_j >= t} == v. When ties make the
/// count skip v, the smallest candidate with count <= v is used instead; if
/// none exists the threshold is +inf.
SelectionOutcome kfwer_threshold(const Vector& w, int k, double q);

/// Selection at a fixed threshold.
std::vector<Eigen::Index> select_at(const Vector& w, double threshold);

struct Score {
  double fdp = 0.0;
  double power = 0.0;
};

/// FDP = |S n H0| / max(|S|, 1), power = |S n H1| / |H1| (0 when H1 is empty).
Score score(const SelectionOutcome& outcome, const GroundTruth& truth);
Score score(const std::vector<Eigen::Index>& selected, const GroundTruth& truth);

}  // namespace ark
