#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pauc/dataset.hpp"
#include "pauc/metrics.hpp"
#include "pauc/scoring.hpp"

namespace pauc {

// 1 / (1 + exp(-(f_pos - f_neg))), evaluated on the non-overflowing branch.
double sigmoid_pair(double f_pos, double f_neg);

struct SurrogateEval {
  double value = 0.0;
  std::vector<double> grad;          // empty for value-only evaluation
  std::vector<std::size_t> ranking;  // negatives in descending score order
};

// Empirical pAUC with every indicator replaced by sigmoid_pair, using the same
// band weights as empirical_pauc. The negatives are ranked by the current
// scores unless `frozen_ranking` is supplied.
SurrogateEval surrogate_pauc(const Scorer& sc, const Dataset& ds, const PaucRange& range,
                             std::optional<std::span<const std::size_t>> frozen_ranking = std::nullopt);

// Value and gradient. The ranking is held fixed while differentiating, so the
// result is the gradient of the smooth piece active at the current parameters.
SurrogateEval surrogate_grad(const Scorer& sc, const Dataset& ds, const PaucRange& range,
                             std::optional<std::span<const std::size_t>> frozen_ranking = std::nullopt);

// f(x) for every row, in row order. Parallel over rows.
std::vector<double> score_rows(const Scorer& sc, const Matrix& rows);

// Serial versions of the kernels above, kept as the reference the parallel
// code is tested and benchmarked against. Pairs are summed in the textbook
// double loop i (positives) x j (band ranks).
namespace reference {

std::vector<double> score_rows(const Scorer& sc, const Matrix& rows);
SurrogateEval surrogate_grad(const Scorer& sc, const Dataset& ds, const PaucRange& range,
                             std::optional<std::span<const std::size_t>> frozen_ranking = std::nullopt);

}  // namespace reference

}  // namespace pauc
