#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pauc/dataset.hpp"
#include "pauc/gmm.hpp"
#include "pauc/scoring.hpp"
#include "pauc/trainer.hpp"

namespace pauc {

// Per-class fold assignment: each class is shuffled with its own seeded
// stream and dealt round-robin, so per-class fold sizes differ by at most one.
struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> pos_fold;
  std::vector<std::size_t> neg_fold;

  // (training portion, held-out fold)
  std::pair<Dataset, Dataset> split(const Dataset& ds, std::size_t fold) const;
};

FoldPlan kfold_stratified(const Dataset& ds, std::size_t k, std::uint64_t seed);

struct HyperPoint {
  Family family = Family::Linear;
  std::size_t layers = 1;  // Mlp
  std::size_t width = 50;  // Mlp, every hidden layer
  Activation activation = Activation::Tanh;
  std::size_t k = 1;  // GmmRatio, components per class
  double l1 = 0.0;
  bool operator==(const HyperPoint&) const = default;
};

std::string describe(const HyperPoint& p);

// Candidate lists per hyperparameter. Only the axes relevant to `family`
// take part in the Cartesian product.
struct HyperGrid {
  Family family = Family::Linear;
  std::vector<std::size_t> layers{1};
  std::vector<std::size_t> widths{50};
  std::vector<Activation> activations{Activation::Tanh};
  std::vector<std::size_t> ks{1};
  std::vector<double> l1{0.0};

  // Deterministic order: layers, width, activation, k, l1 (last varies fastest).
  std::vector<HyperPoint> points() const;

  // Desk-scale grid: layers {1,2}, widths {50,100}, K {1,2,4,8}, tanh, l1 = 0.
  static HyperGrid desk(Family family);
  // Layers {1..4}, widths {50n : 1 <= n <= 20}, tanh/selu, K {1..19},
  // l1 in {1e-3, 1e-2, 1e-1, 1, 10}.
  static HyperGrid full(Family family);
};

// Builds the starting scorer for a grid point: zeros for Linear, a seeded
// fan-in uniform net for Mlp, per-class EM fits for GmmRatio.
Scorer initial_scorer(const HyperPoint& p, const Dataset& train_ds, std::uint64_t seed, const EmOptions& em = {});

struct CvRow {
  HyperPoint point;
  std::vector<double> fold_pauc;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over folds
};

struct CvResult {
  std::vector<CvRow> table;  // grid order
  std::size_t best = 0;      // argmax of mean, first on ties
};

struct GridSearchOptions {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  TrainConfig base;  // l1_weight is overridden by each grid point
  EmOptions em;
  bool standardize = true;
  bool parallel_points = true;
  // Invoked after each standardizer fit.
  std::function<void()> on_standardizer_fit;
};

// k-fold cross-validation of every grid point. Each fold's standardizer is
// fitted on that fold's training portion only; the score of a fold is the
// best validation pAUC reached while training on it.
CvResult grid_search(const HyperGrid& grid, const Dataset& ds, const GridSearchOptions& opts);

std::size_t argmax_first(const std::vector<double>& values);

void write_cv_csv(const CvResult& cv, std::ostream& out);

}  // namespace pauc
