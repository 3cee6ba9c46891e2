#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pauc/dataset.hpp"
#include "pauc/scoring.hpp"

namespace pauc {

struct EmOptions {
  double tol = 1e-6;  // stop once the mean log-likelihood gains less than this
  std::size_t max_iter = 200;
};

struct EmResult {
  GmmParams params;
  // Mean log-likelihood of the data under the parameters entering each E-step.
  std::vector<double> log_likelihood;
  std::size_t iterations = 0;  // completed M-steps
  bool converged = false;
  std::vector<std::string> warnings;
};

// Maximum-likelihood diagonal-covariance mixture by EM. Means start from a
// seeded k-means++ selection, stddevs from the pooled per-dimension stddev,
// weights uniform. Components whose stddev collapses are floored at
// kMinGmmStddev and reported in `warnings`.
EmResult fit_em(const Matrix& samples, std::size_t k, std::uint64_t seed, const EmOptions& opts = {});

double gmm_mean_log_likelihood(const GmmParams& g, const Matrix& samples);

// Per-class EM fits packed into a GmmRatio scorer.
Scorer init_gmm_ratio(const Dataset& ds, std::size_t k_pos, std::size_t k_neg, std::uint64_t seed,
                      const EmOptions& opts = {});

}  // namespace pauc
