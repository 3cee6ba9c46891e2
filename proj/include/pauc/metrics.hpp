#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace pauc {

// FPR band (alpha, beta) with 0 <= alpha < beta <= 1.
class PaucRange {
 public:
  // Throws InvalidRange when the band is not well-formed.
  PaucRange(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double width() const noexcept { return beta_ - alpha_; }

  bool operator==(const PaucRange&) const = default;

 private:
  double alpha_;
  double beta_;
};

struct ScoreAssignment {
  std::span<const double> pos;
  std::span<const double> neg;
};

// Weight of one ranked negative in the empirical pAUC: the overlap of its
// FPR cell [(j-1)/n, j/n] with [alpha, beta], measured in units of 1/n.
struct RankWeight {
  std::size_t rank;  // 0-based position in descending score order
  double weight;
};

// Boundary bookkeeping of the empirical estimator. With j_a = ceil(alpha n)
// and j_b = floor(beta n) the weights are (j_a - alpha n) on rank j_a, 1 on
// ranks j_a+1 .. j_b and (beta n - j_b) on rank j_b+1; zero-weight terms are
// omitted so rank n+1 is never produced. A band that falls strictly inside
// one cell gets the single weight (beta - alpha) n.
std::vector<RankWeight> band_weights(std::size_t n_neg, const PaucRange& range);

// Stable descending order: equal scores keep their original order.
std::vector<std::size_t> rank_negatives(std::span<const double> neg_scores);

double empirical_auc(const ScoreAssignment& sa);
double empirical_pauc(const ScoreAssignment& sa, const PaucRange& range);

struct RocPoint {
  double fpr;
  double tpr;
  bool operator==(const RocPoint&) const = default;
};

struct RocCurve {
  std::vector<RocPoint> points;
};

// Threshold sweep from +inf downwards. Positive/negative ties are recorded as
// the lower staircase (negative step first).
RocCurve roc_curve(const ScoreAssignment& sa);

// Integral of the staircase TPR over [alpha, beta], divided by the width.
double pauc_by_integration(const RocCurve& roc, const PaucRange& range);

// Largest TPR reached at FPR <= fpr.
double tpr_at_fpr(const RocCurve& roc, double fpr);

void write_roc_csv(const RocCurve& roc, std::ostream& out);

}  // namespace pauc
