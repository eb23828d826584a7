#include "crowd/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace crowd {

namespace {

struct Contingency {
  std::vector<std::vector<long>> counts;  // clusters of a x clusters of b
  std::vector<long> row_sums, col_sums;
  long n = 0;
};

Contingency contingency(const GroupPartition& a, const GroupPartition& b) {
  if (a.labels.size() != b.labels.size())
    throw Error(Errc::AgentMismatch, "partitions cover different agents");
  for (const auto& [id, g] : a.labels)
    if (!b.labels.count(id))
      throw Error(Errc::AgentMismatch, "agent " + std::to_string(id) + " missing from one partition");

  Contingency c;
  const int ka = a.group_count(), kb = b.group_count();
  c.counts.assign(static_cast<std::size_t>(ka), std::vector<long>(static_cast<std::size_t>(kb), 0));
  c.row_sums.assign(static_cast<std::size_t>(ka), 0);
  c.col_sums.assign(static_cast<std::size_t>(kb), 0);
  for (const auto& [id, ga] : a.labels) {
    int gb = b.labels.at(id);
    ++c.counts[static_cast<std::size_t>(ga - 1)][static_cast<std::size_t>(gb - 1)];
    ++c.row_sums[static_cast<std::size_t>(ga - 1)];
    ++c.col_sums[static_cast<std::size_t>(gb - 1)];
    ++c.n;
  }
  return c;
}

double entropy(const std::vector<long>& sums, long n) {
  double h = 0;
  for (long s : sums) {
    if (s <= 0) continue;
    double p = static_cast<double>(s) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

double pairs(long n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

}  // namespace

double nmi(const GroupPartition& a, const GroupPartition& b) {
  Contingency c = contingency(a, b);
  double ha = entropy(c.row_sums, c.n);
  double hb = entropy(c.col_sums, c.n);
  if (ha == 0 && hb == 0) return 1.0;  // both single-cluster

  // identical partitions up to relabeling: exactly 1 by definition, not a
  // round trip through logarithms
  bool identical = c.counts.size() == c.counts[0].size();
  for (std::size_t i = 0; identical && i < c.counts.size(); ++i) {
    int nonzero = 0;
    for (std::size_t j = 0; j < c.counts[i].size(); ++j) {
      if (c.counts[i][j] == 0) continue;
      ++nonzero;
      if (c.counts[i][j] != c.row_sums[i] || c.counts[i][j] != c.col_sums[j]) identical = false;
    }
    if (nonzero != 1) identical = false;
  }
  if (identical) return 1.0;

  double mi = 0;
  for (std::size_t i = 0; i < c.counts.size(); ++i)
    for (std::size_t j = 0; j < c.counts[i].size(); ++j) {
      long nij = c.counts[i][j];
      if (nij <= 0) continue;
      double pij = static_cast<double>(nij) / static_cast<double>(c.n);
      double pi = static_cast<double>(c.row_sums[i]) / static_cast<double>(c.n);
      double pj = static_cast<double>(c.col_sums[j]) / static_cast<double>(c.n);
      mi += pij * std::log(pij / (pi * pj));
    }
  return std::max(0.0, mi) / (0.5 * (ha + hb));
}

double purity(const GroupPartition& pred, const GroupPartition& truth) {
  Contingency c = contingency(pred, truth);
  long hit = 0;
  for (const auto& row : c.counts) {
    long best = 0;
    for (long v : row) best = std::max(best, v);
    hit += best;
  }
  return static_cast<double>(hit) / static_cast<double>(c.n);
}

double rand_index(const GroupPartition& a, const GroupPartition& b) {
  Contingency c = contingency(a, b);
  if (c.n < 2) throw Error(Errc::InvalidArgument, "rand index needs at least 2 agents");

  double same_same = 0;
  for (const auto& row : c.counts)
    for (long v : row) same_same += pairs(v);
  double same_a = 0, same_b = 0;
  for (long v : c.row_sums) same_a += pairs(v);
  for (long v : c.col_sums) same_b += pairs(v);
  double total = pairs(c.n);
  double agreements = same_same + (total - same_a - same_b + same_same);
  return agreements / total;
}

int activity_class_index(ActivityLabel label) {
  switch (label) {
    case ActivityLabel::Stationary: return 0;
    case ActivityLabel::Approaching: return 1;
    case ActivityLabel::Walking: return 2;
    case ActivityLabel::Splitting: return 3;
    case ActivityLabel::Stopping:
      throw Error(Errc::InvalidArgument, "Stopping is not a group activity class");
  }
  throw Error(Errc::InvalidArgument, "bad activity label");
}

ActivityScore score_activities(const std::vector<ActivityLabel>& pred,
                               const std::vector<ActivityLabel>& truth) {
  if (pred.size() != truth.size())
    throw Error(Errc::AgentMismatch, "prediction and truth cover different group sets");
  ActivityScore s;
  s.total = static_cast<int>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i)
    ++s.confusion[static_cast<std::size_t>(activity_class_index(truth[i]))]
                 [static_cast<std::size_t>(activity_class_index(pred[i]))];

  int hits = 0;
  for (int t = 0; t < 4; ++t) {
    int row = 0;
    for (int p = 0; p < 4; ++p) row += s.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    int diag = s.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)];
    hits += diag;
    s.per_class[static_cast<std::size_t>(t)] =
        row > 0 ? static_cast<double>(diag) / row : std::numeric_limits<double>::quiet_NaN();
  }
  s.accuracy = s.total > 0 ? static_cast<double>(hits) / s.total : 0.0;
  return s;
}

}  // namespace crowd
