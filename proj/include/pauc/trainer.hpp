#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pauc/dataset.hpp"
#include "pauc/metrics.hpp"
#include "pauc/scoring.hpp"

namespace pauc {

struct TrainConfig {
  PaucRange range{0.0, 0.1};
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double l1_weight = 0.0;
  std::size_t max_epochs = 500;
  std::size_t patience = 50;  // 0 disables early stopping
  std::uint64_t seed = 0;

  // Throws InvalidConfig when a field is out of its domain.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam ascent step on `params`:
//   g = grad - l1_weight * sign(params)   (only where l1_mask is set)
//   params += lr * m_hat / (sqrt(v_hat) + eps)
// An empty mask applies L1 to every coordinate.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad, const TrainConfig& cfg,
               std::span<const std::uint8_t> l1_mask = {});

struct EpochRecord {
  std::size_t epoch;
  double train_objective;  // surrogate value at the parameters the step started from
  double valid_pauc;       // exact empirical pAUC after the step
  bool operator==(const EpochRecord&) const = default;
};

struct TrainedModel {
  Scorer scorer;
  std::vector<EpochRecord> history;
  TrainConfig config;
  std::optional<Standardizer> standardizer;  // applied to raw inputs before scoring
  std::size_t best_epoch = 0;                // 0 when no epoch ran
};

// Full-batch ascent on the surrogate with validation-based snapshotting. The
// returned scorer is the one with the highest validation pAUC (earliest on
// ties). Throws NonFiniteObjective if the objective, its gradient or the
// parameters stop being finite.
TrainedModel train(const Scorer& init, const Dataset& train_ds, const Dataset& valid_ds, const TrainConfig& cfg);

inline constexpr std::array<double, 3> kReadoutFprs{0.01, 0.05, 0.1};

struct MetricsReport {
  std::array<double, 3> pauc{};  // pAUC(0, fpr) for fpr in kReadoutFprs
  std::array<double, 3> tpr{};   // TPR at fpr in kReadoutFprs
  double auc = 0.0;
  bool operator==(const MetricsReport&) const = default;
};

MetricsReport evaluate(const Scorer& sc, const Dataset& test_ds);
// Applies the model's standardizer (if any) to test_ds first.
MetricsReport evaluate(const TrainedModel& model, const Dataset& test_ds);

}  // namespace pauc
