#include "pauc/objective.hpp"

#include <algorithm>
#include <cmath>

#include "pauc/error.hpp"

namespace pauc {

namespace {

struct SigmoidSlope {
  double value;
  double slope;  // value * (1 - value), without cancellation
};

SigmoidSlope sigmoid_with_slope(double diff) {
  const double e = std::exp(-std::abs(diff));
  const double inv = 1.0 / (1.0 + e);
  const double value = diff >= 0.0 ? inv : e * inv;
  return {value, e * inv * inv};
}

// Gradient rows are accumulated in fixed-size chunks, each into its own
// buffer; buffers are then added in chunk order. The result does not depend
// on the thread count.
constexpr std::size_t kGradChunk = 64;

struct Band {
  std::vector<std::size_t> neg_index;  // sample index of each weighted rank
  std::vector<double> weight;
  std::vector<std::size_t> ranking;
};

Band make_band(std::span<const double> neg_scores, const PaucRange& range,
               std::optional<std::span<const std::size_t>> frozen) {
  Band band;
  if (frozen) {
    if (frozen->size() != neg_scores.size()) {
      throw Error(ErrorCode::LengthMismatch, "frozen ranking length differs from negative count");
    }
    band.ranking.assign(frozen->begin(), frozen->end());
    for (std::size_t idx : band.ranking) {
      if (idx >= neg_scores.size()) throw Error(ErrorCode::LengthMismatch, "frozen ranking index out of range");
    }
  } else {
    band.ranking = rank_negatives(neg_scores);
  }
  for (const auto& [rank, w] : band_weights(neg_scores.size(), range)) {
    band.neg_index.push_back(band.ranking[rank]);
    band.weight.push_back(w);
  }
  return band;
}

void check_dims(const Scorer& sc, const Dataset& ds) {
  if (sc.dim() != ds.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: scorer expects dimension " +
                                                  std::to_string(sc.dim()) + ", data has " + std::to_string(ds.dim()));
  }
}

SurrogateEval evaluate(const Scorer& sc, const Dataset& ds, const PaucRange& range,
                       std::optional<std::span<const std::size_t>> frozen, bool with_grad) {
  check_dims(sc, ds);
  const auto fp = score_rows(sc, ds.positives());
  const auto fn = score_rows(sc, ds.negatives());
  Band band = make_band(fn, range, frozen);

  const auto n_pos = static_cast<std::ptrdiff_t>(fp.size());
  const auto m = static_cast<std::ptrdiff_t>(band.weight.size());
  const double norm = static_cast<double>(fp.size()) * static_cast<double>(fn.size()) * range.width();

  std::vector<double> row_value(fp.size(), 0.0);
  std::vector<double> row_slope(fp.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n_pos; ++i) {
    double v = 0.0, s = 0.0;
    for (std::ptrdiff_t j = 0; j < m; ++j) {
      const auto sig = sigmoid_with_slope(fp[i] - fn[band.neg_index[j]]);
      v += band.weight[j] * sig.value;
      s += band.weight[j] * sig.slope;
    }
    row_value[i] = v;
    row_slope[i] = s;
  }

  SurrogateEval out;
  for (double v : row_value) out.value += v;
  out.value /= norm;
  out.ranking = std::move(band.ranking);
  if (!with_grad) return out;

  std::vector<double> col_slope(band.weight.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < m; ++j) {
    const double neg = fn[band.neg_index[j]];
    double s = 0.0;
    for (std::ptrdiff_t i = 0; i < n_pos; ++i) s += sigmoid_with_slope(fp[i] - neg).slope;
    col_slope[j] = band.weight[j] * s;
  }

  // Work items: every positive with +row_slope, every band negative with -col_slope.
  const std::size_t items = fp.size() + band.weight.size();
  const std::size_t chunks = (items + kGradChunk - 1) / kGradChunk;
  const std::size_t p = sc.params().size();
  std::vector<double> partial(chunks * p, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    std::span<double> acc(partial.data() + static_cast<std::size_t>(c) * p, p);
    const std::size_t first = static_cast<std::size_t>(c) * kGradChunk;
    const std::size_t last = std::min(items, first + kGradChunk);
    for (std::size_t t = first; t < last; ++t) {
      if (t < fp.size()) {
        sc.accumulate_grad(ds.positives().row(t), row_slope[t] / norm, acc);
      } else {
        const std::size_t j = t - fp.size();
        sc.accumulate_grad(ds.negatives().row(band.neg_index[j]), -col_slope[j] / norm, acc);
      }
    }
  }
  out.grad.assign(p, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t k = 0; k < p; ++k) out.grad[k] += partial[c * p + k];
  }
  return out;
}

}  // namespace

double sigmoid_pair(double f_pos, double f_neg) { return sigmoid_with_slope(f_pos - f_neg).value; }

std::vector<double> score_rows(const Scorer& sc, const Matrix& rows) {
  if (!rows.empty() && rows.cols() != sc.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: scorer expects dimension " +
                                                  std::to_string(sc.dim()) + ", data has " + std::to_string(rows.cols()));
  }
  std::vector<double> out(rows.rows());
  const auto n = static_cast<std::ptrdiff_t>(rows.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = sc.score(rows.row(static_cast<std::size_t>(i)));
  return out;
}

SurrogateEval surrogate_pauc(const Scorer& sc, const Dataset& ds, const PaucRange& range,
                             std::optional<std::span<const std::size_t>> frozen_ranking) {
  return evaluate(sc, ds, range, frozen_ranking, false);
}

SurrogateEval surrogate_grad(const Scorer& sc, const Dataset& ds, const PaucRange& range,
                             std::optional<std::span<const std::size_t>> frozen_ranking) {
  return evaluate(sc, ds, range, frozen_ranking, true);
}

}  // namespace pauc
