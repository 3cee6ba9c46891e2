#include "pauc/trainer.hpp"

#include <cmath>
#include <limits>

#include "pauc/error.hpp"
#include "pauc/objective.hpp"

namespace pauc {

void TrainConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, "InvalidConfig: " + what); };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) fail("adam_eps must be > 0");
  if (!(l1_weight >= 0.0) || !std::isfinite(l1_weight)) fail("l1_weight must be >= 0");
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad, const TrainConfig& cfg,
               std::span<const std::uint8_t> l1_mask) {
  const std::size_t n = params.size();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n || (!l1_mask.empty() && l1_mask.size() != n)) {
    throw Error(ErrorCode::LengthMismatch, "LengthMismatch: adam_step vectors disagree in length");
  }
  if (state.t == std::numeric_limits<std::uint64_t>::max()) {
    throw Error(ErrorCode::NonFiniteObjective, "adam step counter overflow");
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
  for (std::size_t k = 0; k < n; ++k) {
    double g = grad[k];
    if (cfg.l1_weight > 0.0 && (l1_mask.empty() || l1_mask[k])) {
      g -= cfg.l1_weight * static_cast<double>((params[k] > 0.0) - (params[k] < 0.0));
    }
    state.m[k] = cfg.adam_beta1 * state.m[k] + (1.0 - cfg.adam_beta1) * g;
    state.v[k] = cfg.adam_beta2 * state.v[k] + (1.0 - cfg.adam_beta2) * g * g;
    const double m_hat = state.m[k] / c1;
    const double v_hat = state.v[k] / c2;
    params[k] += cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
  }
}

namespace {

double validation_pauc(const Scorer& sc, const Dataset& ds, const PaucRange& range) {
  const auto fp = score_rows(sc, ds.positives());
  const auto fn = score_rows(sc, ds.negatives());
  return empirical_pauc({fp, fn}, range);
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

TrainedModel train(const Scorer& init, const Dataset& train_ds, const Dataset& valid_ds, const TrainConfig& cfg) {
  cfg.validate();
  for (const Dataset* ds : {&train_ds, &valid_ds}) {
    if (ds->dim() != init.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: scorer expects dimension " +
                                                    std::to_string(init.dim()) + ", data has " +
                                                    std::to_string(ds->dim()));
    }
  }

  TrainedModel model{init, {}, cfg, std::nullopt, 0};
  Scorer current = init;
  AdamState adam(init.params().size());
  const auto mask = init.l1_mask();
  double best = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto eval = surrogate_grad(current, train_ds, cfg.range);
    if (!std::isfinite(eval.value) || !all_finite(eval.grad)) {
      throw Error(ErrorCode::NonFiniteObjective,
                  "NonFiniteObjective(" + std::to_string(epoch) + "): surrogate value or gradient is not finite");
    }
    adam_step(adam, current.mutable_params(), eval.grad, cfg, mask);
    current.clamp_params();
    if (!all_finite(current.params())) {
      throw Error(ErrorCode::NonFiniteObjective,
                  "NonFiniteObjective(" + std::to_string(epoch) + "): parameters diverged");
    }

    const double valid = validation_pauc(current, valid_ds, cfg.range);
    model.history.push_back({epoch, eval.value, valid});
    if (valid > best) {
      best = valid;
      model.scorer = current;
      model.best_epoch = epoch;
      since_best = 0;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      break;
    }
  }
  return model;
}

MetricsReport evaluate(const Scorer& sc, const Dataset& test_ds) {
  const auto fp = score_rows(sc, test_ds.positives());
  const auto fn = score_rows(sc, test_ds.negatives());
  const ScoreAssignment sa{fp, fn};
  const auto roc = roc_curve(sa);
  MetricsReport r;
  for (std::size_t i = 0; i < kReadoutFprs.size(); ++i) {
    r.pauc[i] = pauc_by_integration(roc, PaucRange(0.0, kReadoutFprs[i]));
    r.tpr[i] = tpr_at_fpr(roc, kReadoutFprs[i]);
  }
  r.auc = pauc_by_integration(roc, PaucRange(0.0, 1.0));
  return r;
}

MetricsReport evaluate(const TrainedModel& model, const Dataset& test_ds) {
  if (model.standardizer) return evaluate(model.scorer, apply_standardizer(*model.standardizer, test_ds));
  return evaluate(model.scorer, test_ds);
}

}  // namespace pauc
