#include "pauc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>

#include "pauc/dataset.hpp"
#include "pauc/error.hpp"

namespace pauc {

PaucRange::PaucRange(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha >= 0.0 && alpha < beta && beta <= 1.0)) {
    throw Error(ErrorCode::InvalidRange, "InvalidRange: require 0 <= alpha < beta <= 1, got alpha=" +
                                             format_real(alpha) + " beta=" + format_real(beta));
  }
}

namespace {

// alpha*n and beta*n carry rounding error; values within 1e-12 (relative to
// max(1, value)) of an integer are treated as that integer.
double snap_integral(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= 1e-12 * std::max(1.0, std::abs(v)) ? r : v;
}

void check_scores(const ScoreAssignment& sa) {
  if (sa.pos.empty() || sa.neg.empty()) {
    throw Error(ErrorCode::EmptyClass, "score assignment needs at least one positive and one negative");
  }
}

}  // namespace

std::vector<RankWeight> band_weights(std::size_t n_neg, const PaucRange& range) {
  const double n = static_cast<double>(n_neg);
  const double a = snap_integral(range.alpha() * n);
  const double b = snap_integral(range.beta() * n);
  const auto j_a = static_cast<std::size_t>(std::ceil(a));
  const auto j_b = static_cast<std::size_t>(std::floor(b));

  std::vector<RankWeight> out;
  if (j_a > j_b) {
    // a and b share the cell (j_b, j_b + 1).
    out.push_back({j_b, b - a});
    return out;
  }
  const double head = static_cast<double>(j_a) - a;
  if (head > 0.0) out.push_back({j_a - 1, head});
  for (std::size_t j = j_a; j < j_b; ++j) out.push_back({j, 1.0});
  const double tail = b - static_cast<double>(j_b);
  if (tail > 0.0) out.push_back({j_b, tail});
  return out;
}

std::vector<std::size_t> rank_negatives(std::span<const double> neg_scores) {
  std::vector<std::size_t> order(neg_scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return neg_scores[l] > neg_scores[r]; });
  return order;
}

double empirical_auc(const ScoreAssignment& sa) {
  check_scores(sa);
  std::vector<double> neg(sa.neg.begin(), sa.neg.end());
  std::sort(neg.begin(), neg.end());
  std::uint64_t wins = 0;
  for (double p : sa.pos) {
    wins += static_cast<std::uint64_t>(std::lower_bound(neg.begin(), neg.end(), p) - neg.begin());
  }
  return static_cast<double>(wins) / (static_cast<double>(sa.pos.size()) * static_cast<double>(sa.neg.size()));
}

double empirical_pauc(const ScoreAssignment& sa, const PaucRange& range) {
  check_scores(sa);
  const auto order = rank_negatives(sa.neg);
  std::vector<double> pos(sa.pos.begin(), sa.pos.end());
  std::sort(pos.begin(), pos.end());

  double total = 0.0;
  for (const auto& [rank, weight] : band_weights(sa.neg.size(), range)) {
    const double s = sa.neg[order[rank]];
    const auto above = pos.end() - std::upper_bound(pos.begin(), pos.end(), s);
    total += weight * static_cast<double>(above);
  }
  // Rounding in the band weights can overshoot 1 by a few ulps.
  return std::min(1.0, total / (static_cast<double>(sa.pos.size()) * static_cast<double>(sa.neg.size()) * range.width()));
}

RocCurve roc_curve(const ScoreAssignment& sa) {
  check_scores(sa);
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(sa.pos.size() + sa.neg.size());
  for (double s : sa.pos) all.push_back({s, true});
  for (double s : sa.neg) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Entry& l, const Entry& r) { return l.score > r.score; });

  const double np = static_cast<double>(sa.pos.size());
  const double nn = static_cast<double>(sa.neg.size());
  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t group_pos = 0, group_neg = 0;
    std::size_t k = i;
    for (; k < all.size() && all[k].score == all[i].score; ++k) {
      (all[k].positive ? group_pos : group_neg) += 1;
    }
    if (group_neg > 0) {
      fp += group_neg;
      roc.points.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np});
    }
    if (group_pos > 0) {
      tp += group_pos;
      roc.points.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np});
    }
    i = k;
  }
  return roc;
}

double pauc_by_integration(const RocCurve& roc, const PaucRange& range) {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < roc.points.size(); ++i) {
    const auto& p0 = roc.points[i];
    const auto& p1 = roc.points[i + 1];
    const double lo = std::max(p0.fpr, range.alpha());
    const double hi = std::min(p1.fpr, range.beta());
    if (hi > lo) area += (hi - lo) * p0.tpr;
  }
  return std::min(1.0, area / range.width());
}

double tpr_at_fpr(const RocCurve& roc, double fpr) {
  double best = 0.0;
  for (const auto& p : roc.points) {
    if (p.fpr <= fpr + 1e-12) best = std::max(best, p.tpr);
  }
  return best;
}

void write_roc_csv(const RocCurve& roc, std::ostream& out) {
  out << "fpr,tpr\n";
  for (const auto& p : roc.points) out << format_real(p.fpr) << ',' << format_real(p.tpr) << '\n';
}

}  // namespace pauc
