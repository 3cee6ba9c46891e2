#include "pauc/modelsel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <sstream>

#include "pauc/error.hpp"
#include "pauc/objective.hpp"
#include "pauc/rng.hpp"

namespace pauc {

namespace {

std::vector<std::size_t> deal(std::size_t n, std::size_t k, std::uint64_t seed, std::uint64_t stream) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed, stream);
  rng.shuffle(std::span(order));
  std::vector<std::size_t> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos % k;
  return fold;
}

std::vector<std::size_t> members(const std::vector<std::size_t>& fold, std::size_t f, bool inside) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if ((fold[i] == f) == inside) out.push_back(i);
  }
  return out;
}

}  // namespace

FoldPlan kfold_stratified(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidConfig, "InvalidConfig: k-fold needs k >= 2");
  if (ds.n_pos() < k || ds.n_neg() < k) {
    throw Error(ErrorCode::TooFewSamplesPerClass, "TooFewSamplesPerClass: " + std::to_string(ds.n_pos()) +
                                                      " positives / " + std::to_string(ds.n_neg()) +
                                                      " negatives for k=" + std::to_string(k));
  }
  return {k, seed, deal(ds.n_pos(), k, seed, 0), deal(ds.n_neg(), k, seed, 1)};
}

std::pair<Dataset, Dataset> FoldPlan::split(const Dataset& ds, std::size_t fold) const {
  if (ds.n_pos() != pos_fold.size() || ds.n_neg() != neg_fold.size()) {
    throw Error(ErrorCode::LengthMismatch, "fold plan was built for a different dataset");
  }
  const auto take = [&](bool inside) {
    return Dataset(ds.positives().select(members(pos_fold, fold, inside)),
                   ds.negatives().select(members(neg_fold, fold, inside)), ds.feature_names());
  };
  return {take(false), take(true)};
}

std::string describe(const HyperPoint& p) {
  std::ostringstream out;
  switch (p.family) {
    case Family::Linear: break;
    case Family::Mlp: out << "layers=" << p.layers << " width=" << p.width << " act=" << to_string(p.activation) << ' '; break;
    case Family::GmmRatio: out << "k=" << p.k << ' '; break;
  }
  out << "l1=" << p.l1;
  return out.str();
}

std::vector<HyperPoint> HyperGrid::points() const {
  const bool mlp = family == Family::Mlp;
  const bool gmm = family == Family::GmmRatio;
  const std::vector<std::size_t> one_size{0};
  const std::vector<Activation> one_act{Activation::Tanh};
  const auto& ax_layers = mlp ? layers : one_size;
  const auto& ax_widths = mlp ? widths : one_size;
  const auto& ax_acts = mlp ? activations : one_act;
  const auto& ax_ks = gmm ? ks : one_size;
  if (ax_layers.empty() || ax_widths.empty() || ax_acts.empty() || ax_ks.empty() || l1.empty()) {
    throw Error(ErrorCode::InvalidConfig, "InvalidConfig: hyperparameter grid has an empty axis");
  }

  std::vector<HyperPoint> out;
  for (std::size_t layer_count : ax_layers) {
    for (std::size_t width : ax_widths) {
      for (Activation act : ax_acts) {
        for (std::size_t k : ax_ks) {
          for (double w : l1) {
            HyperPoint p;
            p.family = family;
            if (mlp) {
              p.layers = layer_count;
              p.width = width;
              p.activation = act;
            }
            if (gmm) p.k = k;
            p.l1 = w;
            out.push_back(p);
          }
        }
      }
    }
  }
  return out;
}

HyperGrid HyperGrid::desk(Family family) {
  HyperGrid g;
  g.family = family;
  g.layers = {1, 2};
  g.widths = {50, 100};
  g.activations = {Activation::Tanh};
  g.ks = {1, 2, 4, 8};
  g.l1 = {0.0};
  return g;
}

HyperGrid HyperGrid::full(Family family) {
  HyperGrid g;
  g.family = family;
  g.layers = {1, 2, 3, 4};
  g.widths.clear();
  for (std::size_t n = 1; n <= 20; ++n) g.widths.push_back(50 * n);
  g.activations = {Activation::Tanh, Activation::Selu};
  g.ks.clear();
  for (std::size_t k = 1; k <= 19; ++k) g.ks.push_back(k);
  g.l1 = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  return g;
}

Scorer initial_scorer(const HyperPoint& p, const Dataset& train_ds, std::uint64_t seed, const EmOptions& em) {
  switch (p.family) {
    case Family::Linear:
      return init_linear(train_ds.dim());
    case Family::Mlp:
      return init_mlp(train_ds.dim(), std::vector<std::size_t>(p.layers, p.width), p.activation, seed);
    case Family::GmmRatio:
      return init_gmm_ratio(train_ds, p.k, p.k, seed, em);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown family");
}

std::size_t argmax_first(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

CvResult grid_search(const HyperGrid& grid, const Dataset& ds, const GridSearchOptions& opts) {
  opts.base.validate();
  const auto points = grid.points();
  const FoldPlan plan = kfold_stratified(ds, opts.k, opts.seed);

  std::vector<std::pair<Dataset, Dataset>> folds;
  folds.reserve(opts.k);
  for (std::size_t f = 0; f < opts.k; ++f) {
    auto [tr, va] = plan.split(ds, f);
    if (opts.standardize) {
      const auto st = fit_standardizer(tr);
      if (opts.on_standardizer_fit) opts.on_standardizer_fit();
      folds.emplace_back(apply_standardizer(st, tr), apply_standardizer(st, va));
    } else {
      folds.emplace_back(std::move(tr), std::move(va));
    }
  }

  CvResult result;
  result.table.resize(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  const auto run_point = [&](std::size_t i) {
    CvRow& row = result.table[i];
    row.point = points[i];
    TrainConfig cfg = opts.base;
    cfg.l1_weight = points[i].l1;
    for (std::size_t f = 0; f < opts.k; ++f) {
      const auto& [tr, va] = folds[f];
      const Scorer init = initial_scorer(points[i], tr, opts.seed + f, opts.em);
      const TrainedModel model = train(init, tr, va, cfg);
      double score;
      if (model.history.empty()) {
        const auto fp = score_rows(model.scorer, va.positives());
        const auto fn = score_rows(model.scorer, va.negatives());
        score = empirical_pauc({fp, fn}, cfg.range);
      } else {
        score = model.history[model.best_epoch - 1].valid_pauc;
      }
      row.fold_pauc.push_back(score);
    }
    const double n = static_cast<double>(row.fold_pauc.size());
    row.mean = std::accumulate(row.fold_pauc.begin(), row.fold_pauc.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : row.fold_pauc) ss += (v - row.mean) * (v - row.mean);
    row.stddev = std::sqrt(ss / (n - 1.0));
  };

  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic) if (opts.parallel_points)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      run_point(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<double> means;
  for (const auto& row : result.table) means.push_back(row.mean);
  result.best = argmax_first(means);
  return result;
}

void write_cv_csv(const CvResult& cv, std::ostream& out) {
  if (cv.table.empty()) return;
  const Family family = cv.table.front().point.family;
  out << "family,";
  if (family == Family::Mlp) out << "layers,width,activation,";
  if (family == Family::GmmRatio) out << "k,";
  out << "l1,mean_pauc,std_pauc,best\n";
  for (std::size_t i = 0; i < cv.table.size(); ++i) {
    const auto& r = cv.table[i];
    out << to_string(family) << ',';
    if (family == Family::Mlp) out << r.point.layers << ',' << r.point.width << ',' << to_string(r.point.activation) << ',';
    if (family == Family::GmmRatio) out << r.point.k << ',';
    out << format_real(r.point.l1) << ',' << format_real(r.mean) << ',' << format_real(r.stddev) << ','
        << (i == cv.best ? 1 : 0) << '\n';
  }
}

}  // namespace pauc
