#include "ark/selection.hpp"

#include <algorithm>
#include <cmath>

namespace ark {

namespace {

void check_level(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "target level must lie in (0, 1), got " + std::to_string(q));
  }
}

Eigen::Index count_at_least(const Vector& w, double t) {
  return (w.array() >= t).count();
}

Eigen::Index count_at_most(const Vector& w, double t) {
  return (w.array() <= t).count();
}

}  // namespace

std::string to_string(SelectionRule r) {
  return r == SelectionRule::fdr ? "fdr" : "kfwer";
}

std::vector<double> candidate_thresholds(const Vector& w) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w(j) != 0.0 && std::isfinite(w(j))) out.push_back(std::abs(w(j)));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Eigen::Index> select_at(const Vector& w, double threshold) {
  std::vector<Eigen::Index> out;
  if (!std::isfinite(threshold)) return out;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w(j) >= threshold) out.push_back(j);
  }
  return out;
}

SelectionOutcome fdr_threshold(const Vector& w, double q, int offset) {
  check_level(q);
  if (offset != 0 && offset != 1) throw Error(ErrorKind::InvalidArgument, "offset must be 0 or 1");
  SelectionOutcome out;
  out.rule = SelectionRule::fdr;
  out.q = q;
  out.offset = offset;
  for (double t : candidate_thresholds(w)) {
    const double num = static_cast<double>(offset + count_at_most(w, -t));
    const double den = static_cast<double>(std::max<Eigen::Index>(count_at_least(w, t), 1));
    if (num / den <= q) {
      out.threshold = t;
      break;
    }
  }
  out.selected = select_at(w, out.threshold);
  return out;
}

double negative_binomial_tail(int v, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  if (v < 0) throw Error(ErrorKind::InvalidArgument, "v must be nonnegative");
  if (v == 0) return 0.0;
  // pmf(i) = C(i + v - 1, i) 2^{-(i + v)}
  double head = 0.0;
  for (int i = 0; i < k; ++i) {
    const double log_pmf = std::lgamma(i + v) - std::lgamma(i + 1.0) - std::lgamma(v) -
                           (i + v) * std::log(2.0);
    head += std::exp(log_pmf);
  }
  return std::max(0.0, 1.0 - head);
}

int kfwer_v(int k, double q) {
  check_level(q);
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  int v = 0;
  while (negative_binomial_tail(v + 1, k) <= q) ++v;
  return v;
}

SelectionOutcome kfwer_threshold(const Vector& w, int k, double q) {
  SelectionOutcome out;
  out.rule = SelectionRule::kfwer;
  out.q = q;
  out.k = k;
  out.v = kfwer_v(k, q);
  const auto v = static_cast<Eigen::Index>(out.v);
  const std::vector<double> grid = candidate_thresholds(w);
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    if (count_at_most(w, -*it) == v) {
      out.threshold = *it;
      break;
    }
  }
  if (std::isinf(out.threshold)) {
    for (double t : grid) {
      if (count_at_most(w, -t) <= v) {
        out.threshold = t;
        break;
      }
    }
  }
  out.selected = select_at(w, out.threshold);
  return out;
}

Score score(const std::vector<Eigen::Index>& selected, const GroundTruth& truth) {
  Score s;
  if (selected.empty()) return s;
  std::size_t true_hits = 0;
  for (Eigen::Index j : selected) {
    if (j < 0 || j >= truth.p()) throw Error(ErrorKind::DimensionMismatch, "selected index out of range", j);
    if (truth.beta(j) != 0.0) ++true_hits;
  }
  s.fdp = static_cast<double>(selected.size() - true_hits) / static_cast<double>(selected.size());
  if (!truth.support.empty()) {
    s.power = static_cast<double>(true_hits) / static_cast<double>(truth.support.size());
  }
  return s;
}

Score score(const SelectionOutcome& outcome, const GroundTruth& truth) {
  return score(outcome.selected, truth);
}

}  // namespace ark
