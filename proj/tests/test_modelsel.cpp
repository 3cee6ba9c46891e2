#include <doctest.h>

#include <atomic>
#include <numeric>
#include <set>
#include <sstream>

#include "pauc/error.hpp"
#include "pauc/modelsel.hpp"

using namespace pauc;

namespace {

Dataset sized(std::size_t n_pos, std::size_t n_neg) {
  std::vector<double> p(n_pos), n(n_neg);
  std::iota(p.begin(), p.end(), 0.0);
  std::iota(n.begin(), n.end(), 1000.0);
  return Dataset(Matrix(1, p), Matrix(1, n));
}

std::vector<std::size_t> fold_sizes(const std::vector<std::size_t>& assignment, std::size_t k) {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t f : assignment) ++sizes.at(f);
  return sizes;
}

GridSearchOptions quick_options() {
  GridSearchOptions opts;
  opts.k = 3;
  opts.seed = 5;
  opts.base.max_epochs = 40;
  opts.base.patience = 10;
  return opts;
}

}  // namespace

TEST_CASE("kfold_stratified") {
  SUBCASE("divisible sizes") {
    const auto plan = kfold_stratified(sized(10, 20), 5, 1);
    CHECK(fold_sizes(plan.pos_fold, 5) == std::vector<std::size_t>(5, 2));
    CHECK(fold_sizes(plan.neg_fold, 5) == std::vector<std::size_t>(5, 4));
  }
  SUBCASE("remainders spread one per fold") {
    auto sizes = fold_sizes(kfold_stratified(sized(11, 23), 5, 2).pos_fold, 5);
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{2, 2, 2, 2, 3});
  }
  SUBCASE("errors") {
    try {
      kfold_stratified(sized(3, 20), 5, 0);
      FAIL("expected TooFewSamplesPerClass");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooFewSamplesPerClass);
    }
    CHECK_THROWS_AS(kfold_stratified(sized(10, 20), 1, 0), Error);
  }
  SUBCASE("a function of class sizes, k and seed only") {
    const auto a = kfold_stratified(sized(17, 40), 4, 9);
    const auto b = kfold_stratified(synth_xor_gmm(17, 40, 0.3, 1), 4, 9);
    CHECK(a.pos_fold == b.pos_fold);
    CHECK(a.neg_fold == b.neg_fold);
    CHECK(kfold_stratified(sized(17, 40), 4, 10).neg_fold != a.neg_fold);
  }
  SUBCASE("splits partition the data") {
    const Dataset ds = sized(13, 31);
    const auto plan = kfold_stratified(ds, 4, 3);
    std::multiset<double> held;
    for (std::size_t f = 0; f < 4; ++f) {
      const auto [tr, va] = plan.split(ds, f);
      CHECK(tr.n_pos() + va.n_pos() == 13);
      CHECK(tr.n_neg() + va.n_neg() == 31);
      for (double v : va.positives().data()) held.insert(v);
      for (double v : va.negatives().data()) held.insert(v);
    }
    CHECK(held.size() == 44);
    CHECK(std::set<double>(held.begin(), held.end()).size() == 44);
  }
}

TEST_CASE("grid points") {
  HyperGrid g;
  g.family = Family::Mlp;
  g.layers = {1, 2};
  g.widths = {5, 7, 9};
  g.activations = {Activation::Tanh, Activation::Selu};
  g.ks = {1, 2, 3};  // ignored for Mlp
  g.l1 = {0.0, 0.1};
  const auto pts = g.points();
  CHECK(pts.size() == 2 * 3 * 2 * 2);
  CHECK(pts[0].l1 == 0.0);
  CHECK(pts[1].l1 == 0.1);
  CHECK(pts[2].activation == Activation::Selu);
  CHECK(pts.back().layers == 2);

  CHECK(HyperGrid::desk(Family::GmmRatio).points().size() == 4);
  CHECK(HyperGrid::desk(Family::Mlp).points().size() == 4);
  CHECK(HyperGrid::desk(Family::Linear).points().size() == 1);
  CHECK(HyperGrid::full(Family::Mlp).points().size() == 4 * 20 * 2 * 5);
  CHECK(HyperGrid::full(Family::GmmRatio).points().size() == 19 * 5);

  g.l1.clear();
  CHECK_THROWS_AS(g.points(), Error);
}

TEST_CASE("argmax_first") {
  CHECK(argmax_first({0.1, 0.5, 0.5, 0.2}) == 1);
  CHECK(argmax_first({0.3}) == 0);
  const std::vector<double> means{0.25, 0.75, 0.5, 0.75};
  for (double c : {-10.0, 0.0, 0.125, 3.0}) {
    std::vector<double> shifted = means;
    for (double& v : shifted) v += c;
    CHECK(argmax_first(shifted) == argmax_first(means));
  }
}

TEST_CASE("single-point grid") {
  HyperGrid g;
  g.family = Family::Linear;
  const auto cv = grid_search(g, synth_xor_gmm(20, 60, 0.5, 2), quick_options());
  REQUIRE(cv.table.size() == 1);
  CHECK(cv.best == 0);
  CHECK(cv.table[0].fold_pauc.size() == 3);
}

TEST_CASE("capacity matters on XOR data") {
  HyperGrid g;
  g.family = Family::Mlp;
  g.widths = {1, 50};
  auto opts = quick_options();
  opts.base.max_epochs = 150;
  opts.base.patience = 30;
  opts.base.range = PaucRange(0.0, 0.1);
  const auto cv = grid_search(g, synth_xor_gmm(60, 600, 0.4, 3), opts);
  REQUIRE(cv.table.size() == 2);
  CHECK(cv.table[cv.best].point.width == 50);
  CHECK(cv.table[1].mean > cv.table[0].mean + 0.1);
}

TEST_CASE("grid search is deterministic, serial or parallel") {
  HyperGrid g = HyperGrid::desk(Family::GmmRatio);
  g.ks = {1, 2};
  const Dataset ds = synth_xor_gmm(30, 150, 0.5, 4);
  auto opts = quick_options();
  const auto a = grid_search(g, ds, opts);
  opts.parallel_points = false;
  const auto b = grid_search(g, ds, opts);
  REQUIRE(a.table.size() == b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    CHECK(a.table[i].point == b.table[i].point);
    CHECK(a.table[i].fold_pauc == b.table[i].fold_pauc);
    CHECK(a.table[i].mean == b.table[i].mean);
  }
  CHECK(a.best == b.best);
}

TEST_CASE("one standardizer fit per fold") {
  HyperGrid g = HyperGrid::desk(Family::Mlp);
  g.layers = {1};
  g.widths = {4, 6};
  std::atomic<int> fits{0};
  auto opts = quick_options();
  opts.base.max_epochs = 3;
  opts.on_standardizer_fit = [&] { ++fits; };
  grid_search(g, synth_xor_gmm(20, 60, 0.5, 2), opts);
  CHECK(fits == 3);
}

TEST_CASE("fold score equals the best validation pAUC of that fold's run") {
  HyperGrid g;
  g.family = Family::Linear;
  const Dataset ds = synth_xor_gmm(25, 90, 0.5, 6);
  auto opts = quick_options();
  opts.standardize = false;
  const auto cv = grid_search(g, ds, opts);
  const auto plan = kfold_stratified(ds, opts.k, opts.seed);
  for (std::size_t f = 0; f < opts.k; ++f) {
    const auto [tr, va] = plan.split(ds, f);
    const auto model = train(init_linear(2), tr, va, opts.base);
    CHECK(cv.table[0].fold_pauc[f] == model.history[model.best_epoch - 1].valid_pauc);
  }
}

TEST_CASE("cv csv layout") {
  CvResult cv;
  HyperPoint p;
  p.family = Family::GmmRatio;
  p.k = 2;
  cv.table.push_back({p, {0.5, 0.7}, 0.6, 0.1});
  p.k = 4;
  cv.table.push_back({p, {0.75, 0.75}, 0.75, 0.0});
  cv.best = 1;
  std::ostringstream out;
  write_cv_csv(cv, out);
  CHECK(out.str() == "family,k,l1,mean_pauc,std_pauc,best\ngmm_ratio,2,0,0.6,0.1,0\ngmm_ratio,4,0,0.75,0,1\n");
}
