#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "pauc/error.hpp"
#include "pauc/gmm.hpp"
#include "pauc/objective.hpp"
#include "pauc/rng.hpp"
#include "pauc/trainer.hpp"

using namespace pauc;

namespace {

// Two 1-D clusters at +/-center with uniform jitter.
Dataset clusters_1d(Rng& rng, std::size_t n_pos, std::size_t n_neg, double center, double jitter) {
  Matrix pos(1, std::vector<double>{}), neg(1, std::vector<double>{});
  for (std::size_t i = 0; i < n_pos; ++i) pos.push_row(std::vector<double>{center + rng.uniform(-jitter, jitter)});
  for (std::size_t i = 0; i < n_neg; ++i) neg.push_row(std::vector<double>{-center + rng.uniform(-jitter, jitter)});
  return Dataset(pos, neg);
}

// Linearly separable in 3-D: the first coordinate separates, the others are noise.
Dataset separable_3d(Rng& rng, std::size_t n_pos, std::size_t n_neg) {
  Matrix pos(3, std::vector<double>{}), neg(3, std::vector<double>{});
  for (std::size_t i = 0; i < n_pos; ++i) pos.push_row(std::vector<double>{2.0 + rng.uniform(0, 1), rng.normal(), rng.normal()});
  for (std::size_t i = 0; i < n_neg; ++i) neg.push_row(std::vector<double>{-2.0 - rng.uniform(0, 1), rng.normal(), rng.normal()});
  return Dataset(pos, neg);
}

double valid_pauc(const Scorer& sc, const Dataset& ds, const PaucRange& range) {
  return empirical_pauc({score_rows(sc, ds.positives()), score_rows(sc, ds.negatives())}, range);
}

}  // namespace

TEST_CASE("TrainConfig validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  for (auto mutate : std::vector<void (*)(TrainConfig&)>{
           [](TrainConfig& c) { c.learning_rate = 0.0; },
           [](TrainConfig& c) { c.adam_beta1 = 1.0; },
           [](TrainConfig& c) { c.adam_beta2 = -0.1; },
           [](TrainConfig& c) { c.adam_eps = 0.0; },
           [](TrainConfig& c) { c.l1_weight = -1.0; },
           [](TrainConfig& c) { c.learning_rate = NAN; },
       }) {
    TrainConfig bad;
    mutate(bad);
    try {
      bad.validate();
      FAIL("expected InvalidConfig");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidConfig);
    }
  }
}

TEST_CASE("adam_step") {
  TrainConfig cfg;
  SUBCASE("first step moves each coordinate by lr in the gradient's direction") {
    AdamState st(3);
    std::vector<double> p{0.0, 1.0, -1.0};
    const std::vector<double> g{0.3, -2.0, 1e-3};
    adam_step(st, p, g, cfg);
    CHECK(p[0] == doctest::Approx(cfg.learning_rate).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(1.0 - cfg.learning_rate).epsilon(1e-6));
    CHECK(p[2] == doctest::Approx(-1.0 + cfg.learning_rate).epsilon(1e-4));
    CHECK(st.t == 1);
  }
  SUBCASE("zero gradient is a fixed point") {
    AdamState st(2);
    std::vector<double> p{0.5, -0.25};
    adam_step(st, p, std::vector<double>{0.0, 0.0}, cfg);
    CHECK(p == std::vector<double>{0.5, -0.25});
  }
  SUBCASE("l1 shrinks toward zero, only where masked") {
    cfg.l1_weight = 0.1;
    AdamState st(2);
    std::vector<double> p{0.5, 0.5};
    const std::vector<std::uint8_t> mask{1, 0};
    adam_step(st, p, std::vector<double>{0.0, 0.0}, cfg, mask);
    CHECK(p[0] < 0.5);
    CHECK(p[1] == 0.5);
  }
  SUBCASE("length mismatch") {
    AdamState st(2);
    std::vector<double> p{0.0, 0.0};
    CHECK_THROWS_AS(adam_step(st, p, std::vector<double>{1.0}, cfg), Error);
  }
}

TEST_CASE("separable 1-D data reaches pAUC 1 within 50 epochs") {
  Rng rng(1);
  const Dataset tr = clusters_1d(rng, 30, 300, 1.0, 0.01);
  const Dataset va = clusters_1d(rng, 10, 100, 1.0, 0.01);
  TrainConfig cfg;
  cfg.max_epochs = 50;
  const auto model = train(init_linear(1), tr, va, cfg);
  CHECK(model.history.size() <= 50);
  CHECK(model.history[model.best_epoch - 1].valid_pauc == 1.0);

  const auto report = evaluate(model, va);
  CHECK(report.auc == 1.0);
  CHECK(report.tpr[0] == 1.0);
  for (double v : report.pauc) CHECK(v == 1.0);
}

TEST_CASE("max_epochs = 0 returns the initial scorer") {
  Rng rng(2);
  const Dataset ds = clusters_1d(rng, 5, 20, 1.0, 0.5);
  TrainConfig cfg;
  cfg.max_epochs = 0;
  const Scorer init(LinearShape{1}, {0.3});
  const auto model = train(init, ds, ds, cfg);
  CHECK(model.scorer == init);
  CHECK(model.history.empty());
  CHECK(model.best_epoch == 0);
}

TEST_CASE("training is deterministic") {
  const Dataset ds = synth_xor_gmm(30, 200, 0.5, 3);
  const auto [tr, va] = split_stratified(ds, 0.7, 3);
  TrainConfig cfg;
  cfg.max_epochs = 40;
  const Scorer init = init_mlp(2, {10}, Activation::Selu, 5);
  const auto a = train(init, tr, va, cfg);
  const auto b = train(init, tr, va, cfg);
  CHECK(a.history == b.history);
  CHECK(a.scorer == b.scorer);
  CHECK(a.best_epoch == b.best_epoch);
}

TEST_CASE("returned scorer is the best validation snapshot") {
  const Dataset ds = synth_xor_gmm(40, 300, 0.6, 8);
  const auto [tr, va] = split_stratified(ds, 0.6, 8);
  for (Family fam : {Family::Mlp, Family::GmmRatio}) {
    TrainConfig cfg;
    cfg.max_epochs = 60;
    cfg.patience = 0;
    const Scorer init = fam == Family::Mlp ? init_mlp(2, {8}, Activation::Tanh, 1) : init_gmm_ratio(tr, 2, 2, 1);
    const auto model = train(init, tr, va, cfg);
    REQUIRE(model.history.size() == 60);
    double best = -1.0;
    std::size_t first_best = 0;
    for (const auto& rec : model.history) {
      if (rec.valid_pauc > best) {
        best = rec.valid_pauc;
        first_best = rec.epoch;
      }
    }
    CHECK(model.best_epoch == first_best);
    CHECK(valid_pauc(model.scorer, va, cfg.range) == best);
  }
}

TEST_CASE("patience stops early") {
  Rng rng(4);
  const Dataset tr = clusters_1d(rng, 20, 100, 1.0, 0.01);
  TrainConfig cfg;
  cfg.max_epochs = 500;
  cfg.patience = 5;
  const auto model = train(init_linear(1), tr, tr, cfg);
  // perfect after the first step; nothing can beat it afterwards
  CHECK(model.best_epoch == 1);
  CHECK(model.history.size() == 6);
}

TEST_CASE("held-out pairs satisfy the ideal-scorer condition on separable data") {
  Rng rng(5);
  const Dataset tr = separable_3d(rng, 50, 500);
  const Dataset va = separable_3d(rng, 20, 200);
  const Dataset te = separable_3d(rng, 100, 1000);
  TrainConfig cfg;
  cfg.max_epochs = 100;
  const auto model = train(init_linear(3), tr, va, cfg);
  const auto fp = score_rows(model.scorer, te.positives());
  const auto fn = score_rows(model.scorer, te.negatives());
  std::size_t ok = 0;
  for (double p : fp) {
    for (double n : fn) ok += p > n ? 1 : 0;
  }
  CHECK(static_cast<double>(ok) / static_cast<double>(fp.size() * fn.size()) >= 0.99);
}

TEST_CASE("training objective mostly increases under default settings") {
  Rng rng(12);
  const Dataset xor_ds = synth_xor_gmm(60, 600, 0.5, 11);
  const auto [xor_tr, xor_va] = split_stratified(xor_ds, 0.7, 11);
  // overlapping classes with a linear signal
  Matrix pos(3, std::vector<double>{}), neg(3, std::vector<double>{});
  for (int i = 0; i < 60; ++i) pos.push_row(std::vector<double>{3.0 + rng.normal(), rng.normal(), 2.0 + rng.normal()});
  for (int i = 0; i < 600; ++i) neg.push_row(std::vector<double>{rng.normal(), rng.normal(), rng.normal()});
  const auto [lin_tr, lin_va] = split_stratified(Dataset(pos, neg), 0.7, 12);

  TrainConfig cfg;
  cfg.max_epochs = 200;
  cfg.patience = 0;
  const std::vector<std::tuple<Scorer, const Dataset*, const Dataset*>> runs{
      {init_linear(3), &lin_tr, &lin_va},
      {init_mlp(2, {20}, Activation::Tanh, 2), &xor_tr, &xor_va},
      {init_gmm_ratio(xor_tr, 2, 2, 2), &xor_tr, &xor_va},
  };
  for (const auto& [init, tr, va] : runs) {
    const auto model = train(init, *tr, *va, cfg);
    std::size_t up = 0;
    for (std::size_t i = 1; i < model.history.size(); ++i) {
      up += model.history[i].train_objective >= model.history[i - 1].train_objective ? 1 : 0;
    }
    INFO("family " << std::string(to_string(init.family())) << ": " << up << " of " << model.history.size() - 1);
    CHECK(static_cast<double>(up) >= 0.9 * static_cast<double>(model.history.size() - 1));
  }
}

TEST_CASE("diverging parameters raise NonFiniteObjective") {
  Rng rng(6);
  const Dataset ds = clusters_1d(rng, 5, 20, 1.0, 0.5);
  TrainConfig cfg;
  cfg.learning_rate = 1e308;
  cfg.max_epochs = 10;
  cfg.patience = 0;
  try {
    train(Scorer(LinearShape{1}, {1.0}), ds, ds, cfg);
    FAIL("expected NonFiniteObjective");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteObjective);
  }
}

TEST_CASE("evaluate") {
  Rng rng(7);
  const Dataset ds = clusters_1d(rng, 10, 100, 1.0, 0.1);
  SUBCASE("perfect separation") {
    const auto r = evaluate(Scorer(LinearShape{1}, {1.0}), ds);
    CHECK(r.auc == 1.0);
    for (double v : r.pauc) CHECK(v == 1.0);
    for (double v : r.tpr) CHECK(v == 1.0);
  }
  SUBCASE("constant scorer is all ties") {
    const auto r = evaluate(init_linear(1), ds);
    CHECK(r.auc == 0.0);
    for (double v : r.pauc) CHECK(v == 0.0);
  }
  SUBCASE("readouts match the metric functions") {
    const Dataset xor_ds = synth_xor_gmm(50, 400, 0.7, 1);
    const Scorer sc(LinearShape{2}, {0.3, 1.0});
    const auto fp = score_rows(sc, xor_ds.positives());
    const auto fn = score_rows(sc, xor_ds.negatives());
    const auto r = evaluate(sc, xor_ds);
    for (std::size_t i = 0; i < kReadoutFprs.size(); ++i) {
      CHECK(r.pauc[i] == doctest::Approx(empirical_pauc({fp, fn}, PaucRange(0.0, kReadoutFprs[i]))).epsilon(1e-12));
      CHECK(r.tpr[i] == tpr_at_fpr(roc_curve({fp, fn}), kReadoutFprs[i]));
    }
    CHECK(r.auc == doctest::Approx(empirical_auc({fp, fn})).epsilon(1e-12));
    for (double v : r.pauc) CHECK((v >= 0.0 && v <= 1.0));
  }
  SUBCASE("model standardizer is applied first") {
    TrainedModel m{Scorer(LinearShape{1}, {-1.0}), {}, {}, Standardizer{{0.0}, {-1.0}}, 0};
    CHECK(evaluate(m, ds).auc == 1.0);
  }
}
