#include <doctest.h>
#include <omp.h>

#include <cmath>

#include "pauc/error.hpp"
#include "pauc/gmm.hpp"
#include "pauc/objective.hpp"
#include "pauc/rng.hpp"

using namespace pauc;

namespace {

Matrix random_rows(Rng& rng, std::size_t n, std::size_t d, double shift = 0.0) {
  Matrix m(d, std::vector<double>{});
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : row) v = shift + rng.normal();
    m.push_row(row);
  }
  return m;
}

Dataset random_ds(Rng& rng, std::size_t n_pos, std::size_t n_neg, std::size_t d) {
  return Dataset(random_rows(rng, n_pos, d, 0.5), random_rows(rng, n_neg, d));
}

// Direct double sum over every positive and the band-weighted negatives.
double brute_surrogate(const Scorer& sc, const Dataset& ds, const PaucRange& range) {
  std::vector<double> fp, fn;
  for (std::size_t i = 0; i < ds.n_pos(); ++i) fp.push_back(sc.score(ds.positives().row(i)));
  for (std::size_t j = 0; j < ds.n_neg(); ++j) fn.push_back(sc.score(ds.negatives().row(j)));
  const auto order = rank_negatives(fn);
  double total = 0.0;
  for (const auto& [rank, w] : band_weights(fn.size(), range)) {
    for (double p : fp) total += w / (1.0 + std::exp(-(p - fn[order[rank]])));
  }
  return total / (static_cast<double>(fp.size() * fn.size()) * range.width());
}

std::vector<Scorer> family_samples(Rng& rng, std::size_t d) {
  std::vector<Scorer> out;
  std::vector<double> w(d);
  for (auto& v : w) v = rng.normal();
  out.emplace_back(LinearShape{d}, w);
  for (Activation act : {Activation::Tanh, Activation::Selu}) {
    Scorer m = init_mlp(d, {8, 4}, act, rng.next_u64());
    for (double& p : m.mutable_params()) p += 0.1 * rng.normal();
    out.push_back(m);
  }
  const Dataset seed_ds = random_ds(rng, 12, 12, d);
  Scorer g = init_gmm_ratio(seed_ds, 2, 2, rng.next_u64());
  for (double& p : g.mutable_params()) p += 0.2 * rng.normal();
  out.push_back(g);
  return out;
}

}  // namespace

TEST_CASE("sigmoid_pair") {
  CHECK(sigmoid_pair(2.0, 2.0) == 0.5);
  CHECK(sigmoid_pair(std::log(3.0), 0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sigmoid_pair(0.0, 1000.0) >= 0.0);
  CHECK(sigmoid_pair(0.0, 1000.0) < 1e-300);
  CHECK(sigmoid_pair(1000.0, 0.0) == 1.0);
  CHECK(std::isfinite(sigmoid_pair(-1e308, 1e308)));
}

TEST_CASE("surrogate matches a brute-force double sum") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const Dataset ds = random_ds(rng, 1 + rng.below(15), 1 + rng.below(40), 3);
    for (const Scorer& sc : family_samples(rng, 3)) {
      double a = rng.uniform(), b = rng.uniform();
      if (a > b) std::swap(a, b);
      if (b - a < 1e-6) continue;
      const PaucRange range(a, b);
      CHECK(surrogate_pauc(sc, ds, range).value == doctest::Approx(brute_surrogate(sc, ds, range)).epsilon(1e-12));
    }
  }
}

TEST_CASE("full range is ranking independent") {
  Rng rng(13);
  const Dataset ds = random_ds(rng, 9, 17, 2);
  const Scorer sc(LinearShape{2}, {0.7, -1.1});
  const PaucRange full(0.0, 1.0);
  const double natural = surrogate_pauc(sc, ds, full).value;
  std::vector<std::size_t> perm(17);
  std::iota(perm.begin(), perm.end(), 0);
  for (int t = 0; t < 5; ++t) {
    rng.shuffle(std::span(perm));
    CHECK(surrogate_pauc(sc, ds, full, std::span<const std::size_t>(perm)).value ==
          doctest::Approx(natural).epsilon(1e-14));
  }
}

TEST_CASE("zero scorer gives one half on every band") {
  Rng rng(14);
  const Dataset ds = random_ds(rng, 7, 31, 4);
  const Scorer zero = init_linear(4);
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0, 1}, {0, 0.1}, {0.05, 0.37}, {0.9, 1.0}}) {
    CHECK(surrogate_pauc(zero, ds, PaucRange(a, b)).value == doctest::Approx(0.5).epsilon(1e-14));
  }
  const auto g = fit_em(ds.positives(), 2, 0).params;
  const auto eval = surrogate_grad(make_gmm_ratio(g, g), ds, PaucRange(0.0, 0.1));
  CHECK(eval.value == doctest::Approx(0.5).epsilon(1e-14));
  for (double v : eval.grad) CHECK(std::isfinite(v));
}

TEST_CASE("single pair gradient") {
  const Dataset ds(Matrix(2, {1.0, 0.0}), Matrix(2, {0.0, 1.0}));
  const auto eval = surrogate_grad(init_linear(2), ds, PaucRange(0.0, 1.0));
  CHECK(eval.value == 0.5);
  CHECK(eval.grad == std::vector<double>{0.25, -0.25});
}

TEST_CASE("separated limit approaches the exact pAUC monotonically") {
  Rng rng(15);
  // 1-D data with a unit gap between the classes; the linear weight sets the score gap.
  Matrix pos(1, std::vector<double>{}), neg(1, std::vector<double>{});
  for (int i = 0; i < 10; ++i) pos.push_row(std::vector<double>{1.0 + rng.uniform()});
  for (int i = 0; i < 40; ++i) neg.push_row(std::vector<double>{-rng.uniform()});
  const Dataset ds(pos, neg);
  const PaucRange range(0.0, 0.1);
  double last = 1.0;
  for (double gap : {5.0, 10.0, 50.0}) {
    const Scorer sc(LinearShape{1}, {gap});
    const auto fp = score_rows(sc, ds.positives());
    const auto fn = score_rows(sc, ds.negatives());
    const double err = std::abs(surrogate_pauc(sc, ds, range).value - empirical_pauc({fp, fn}, range));
    CHECK(err < last);
    last = err;
  }
  CHECK(last <= 1e-12);
}

TEST_CASE("values stay in (0,1)") {
  Rng rng(16);
  for (int t = 0; t < 10; ++t) {
    const Dataset ds = random_ds(rng, 5, 20, 3);
    for (const Scorer& sc : family_samples(rng, 3)) {
      const double v = surrogate_pauc(sc, ds, PaucRange(0.0, 0.3)).value;
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("tied pair swapped between classes leaves the full-range value unchanged") {
  const Scorer sc(LinearShape{1}, {1.0});
  // The positive and negative at 2.0 trade places.
  const Dataset a(Matrix(1, {2.0, 0.3}), Matrix(1, {-1.0, 2.0, 0.5}));
  const Dataset b(Matrix(1, {0.3, 2.0}), Matrix(1, {2.0, -1.0, 0.5}));
  CHECK(surrogate_pauc(sc, a, PaucRange(0, 1)).value == surrogate_pauc(sc, b, PaucRange(0, 1)).value);
}

TEST_CASE("frozen-ranking finite differences") {
  Rng rng(17);
  for (int t = 0; t < 5; ++t) {
    const Dataset ds = random_ds(rng, 6, 25, 3);
    for (const Scorer& sc : family_samples(rng, 3)) {
      const PaucRange range(0.04, 0.3);
      const auto eval = surrogate_grad(sc, ds, range);
      const std::span<const std::size_t> frozen(eval.ranking);
      for (std::size_t k = 0; k < eval.grad.size(); ++k) {
        const double h = 1e-6;
        Scorer up = sc, down = sc;
        up.mutable_params()[k] += h;
        down.mutable_params()[k] -= h;
        const double fd =
            (surrogate_pauc(up, ds, range, frozen).value - surrogate_pauc(down, ds, range, frozen).value) / (2 * h);
        const double tol = std::max(1e-8, 1e-5 * std::max(std::abs(fd), std::abs(eval.grad[k])));
        INFO("family " << to_string(sc.family()) << " coordinate " << k);
        CHECK(std::abs(fd - eval.grad[k]) <= tol);
      }
    }
  }
}

TEST_CASE("frozen ranking is validated") {
  Rng rng(18);
  const Dataset ds = random_ds(rng, 3, 4, 2);
  const std::vector<std::size_t> short_rank{0, 1, 2};
  const std::vector<std::size_t> bad_rank{0, 1, 2, 9};
  CHECK_THROWS_AS(surrogate_pauc(init_linear(2), ds, PaucRange(0, 1), std::span<const std::size_t>(short_rank)), Error);
  CHECK_THROWS_AS(surrogate_grad(init_linear(2), ds, PaucRange(0, 1), std::span<const std::size_t>(bad_rank)), Error);
  CHECK_THROWS_AS(surrogate_pauc(init_linear(3), ds, PaucRange(0, 1)), Error);
}

TEST_CASE("parallel kernels agree with the serial reference") {
  Rng rng(19);
  const Dataset ds = random_ds(rng, 70, 300, 4);
  for (const Scorer& sc : family_samples(rng, 4)) {
    CHECK(score_rows(sc, ds.negatives()) == reference::score_rows(sc, ds.negatives()));
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0, 1}, {0, 0.1}, {0.013, 0.21}}) {
      const PaucRange range(a, b);
      const auto fast = surrogate_grad(sc, ds, range);
      const auto slow = reference::surrogate_grad(sc, ds, range);
      CHECK(fast.ranking == slow.ranking);
      CHECK(fast.value == doctest::Approx(slow.value).epsilon(1e-12));
      REQUIRE(fast.grad.size() == slow.grad.size());
      double scale = 0.0;
      for (double g : slow.grad) scale = std::max(scale, std::abs(g));
      for (std::size_t k = 0; k < fast.grad.size(); ++k) CHECK(std::abs(fast.grad[k] - slow.grad[k]) <= 1e-12 * scale + 1e-15);
    }
  }
}

TEST_CASE("parallel result does not depend on the thread count") {
  Rng rng(20);
  const Dataset ds = random_ds(rng, 150, 500, 3);
  const Scorer sc = init_mlp(3, {16}, Activation::Tanh, 4);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = surrogate_grad(sc, ds, PaucRange(0.0, 0.2));
  omp_set_num_threads(4);
  const auto four = surrogate_grad(sc, ds, PaucRange(0.0, 0.2));
  omp_set_num_threads(7);
  const auto seven = surrogate_grad(sc, ds, PaucRange(0.0, 0.2));
  omp_set_num_threads(saved);
  CHECK(one.value == four.value);
  CHECK(one.grad == four.grad);
  CHECK(one.grad == seven.grad);
}
