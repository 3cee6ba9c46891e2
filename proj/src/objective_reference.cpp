#include "pauc/objective.hpp"

#include <cmath>

#include "pauc/error.hpp"

namespace pauc::reference {

std::vector<double> score_rows(const Scorer& sc, const Matrix& rows) {
  std::vector<double> out;
  out.reserve(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out.push_back(sc.score(rows.row(i)));
  return out;
}

SurrogateEval surrogate_grad(const Scorer& sc, const Dataset& ds, const PaucRange& range,
                             std::optional<std::span<const std::size_t>> frozen_ranking) {
  if (sc.dim() != ds.dim()) throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch");
  const auto fp = reference::score_rows(sc, ds.positives());
  const auto fn = reference::score_rows(sc, ds.negatives());

  SurrogateEval out;
  if (frozen_ranking) {
    out.ranking.assign(frozen_ranking->begin(), frozen_ranking->end());
  } else {
    out.ranking = rank_negatives(fn);
  }
  const auto band = band_weights(fn.size(), range);
  const double norm = static_cast<double>(fp.size()) * static_cast<double>(fn.size()) * range.width();

  out.grad.assign(sc.params().size(), 0.0);
  for (std::size_t i = 0; i < fp.size(); ++i) {
    const auto g_pos = sc.grad_params(ds.positives().row(i));
    for (const auto& [rank, w] : band) {
      const std::size_t j = out.ranking[rank];
      const double s = 1.0 / (1.0 + std::exp(-(fp[i] - fn[j])));
      out.value += w * s;
      const auto g_neg = sc.grad_params(ds.negatives().row(j));
      for (std::size_t k = 0; k < out.grad.size(); ++k) out.grad[k] += w * s * (1.0 - s) * (g_pos[k] - g_neg[k]);
    }
  }
  out.value /= norm;
  for (double& g : out.grad) g /= norm;
  return out;
}

}  // namespace pauc::reference
