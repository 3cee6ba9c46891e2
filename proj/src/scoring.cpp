#include "pauc/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pauc/error.hpp"
#include "pauc/rng.hpp"

namespace pauc {

const char* to_string(Family f) {
  switch (f) {
    case Family::Linear: return "linear";
    case Family::Mlp: return "mlp";
    case Family::GmmRatio: return "gmm_ratio";
  }
  return "?";
}

const char* to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "selu"; }

Family parse_family(const std::string& s) {
  if (s == "linear") return Family::Linear;
  if (s == "mlp") return Family::Mlp;
  if (s == "gmm_ratio" || s == "gmm") return Family::GmmRatio;
  throw Error(ErrorCode::InvalidConfig, "unknown scorer family '" + s + "' (linear, mlp, gmm_ratio)");
}

Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "selu") return Activation::Selu;
  throw Error(ErrorCode::InvalidConfig, "unknown activation '" + s + "' (tanh, selu)");
}

namespace {

constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
const double kMinLogStddev = std::log(kMinGmmStddev);

struct Activated {
  double value;
  double slope;
};

Activated activate(Activation act, double z) {
  if (act == Activation::Tanh) {
    const double t = std::tanh(z);
    return {t, 1.0 - t * t};
  }
  if (z > 0.0) return {kSeluLambda * z, kSeluLambda};
  const double e = std::exp(z);
  return {kSeluLambda * kSeluAlpha * (e - 1.0), kSeluLambda * kSeluAlpha * e};
}

std::size_t mlp_param_count(const MlpShape& s) {
  std::size_t n = 0, in = s.dim;
  for (std::size_t w : s.widths) {
    n += w * in + w;
    in = w;
  }
  return n + in + 1;
}

void validate_shape(const Shape& shape) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if (s.dim == 0) throw Error(ErrorCode::BadShape, "BadShape: input dimension must be >= 1");
        if constexpr (std::is_same_v<T, MlpShape>) {
          if (s.widths.empty()) throw Error(ErrorCode::BadShape, "BadShape: mlp needs at least one hidden layer");
          for (std::size_t w : s.widths) {
            if (w == 0) throw Error(ErrorCode::BadShape, "BadShape: hidden layer width must be >= 1");
          }
        } else if constexpr (std::is_same_v<T, GmmShape>) {
          if (s.k_pos == 0 || s.k_neg == 0) throw Error(ErrorCode::BadShape, "BadShape: mixture needs K >= 1");
        }
      },
      shape);
}

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// View of one mixture block inside a flat parameter vector.
struct GmmView {
  std::size_t k;
  std::size_t dim;
  const double* p;

  const double* log_weights() const { return p; }
  const double* mean(std::size_t c) const { return p + k + c * dim; }
  const double* log_stddev(std::size_t c) const { return p + k + k * dim + c * dim; }
  std::size_t size() const { return k * (1 + 2 * dim); }
};

// Per-component joint log terms log w_c + log N(x; c), written to `terms`;
// returns the mixture log density.
double gmm_component_terms(const GmmView& g, std::span<const double> x, std::span<double> terms) {
  const double lse_w = log_sum_exp({g.log_weights(), g.k});
  for (std::size_t c = 0; c < g.k; ++c) {
    const double* mu = g.mean(c);
    const double* ls = g.log_stddev(c);
    double t = g.log_weights()[c] - lse_w;
    for (std::size_t j = 0; j < g.dim; ++j) {
      const double s = std::max(ls[j], kMinLogStddev);
      const double z = (x[j] - mu[j]) * std::exp(-s);
      t -= kHalfLog2Pi + s + 0.5 * z * z;
    }
    terms[c] = t;
  }
  return log_sum_exp(terms.first(g.k));
}

double gmm_accumulate(const GmmView& g, std::span<const double> x, double scale, double* acc) {
  std::vector<double> terms(g.k);
  const double log_p = gmm_component_terms(g, x, terms);
  const double lse_w = log_sum_exp({g.log_weights(), g.k});
  for (std::size_t c = 0; c < g.k; ++c) {
    const double resp = std::exp(terms[c] - log_p);
    const double prior = std::exp(g.log_weights()[c] - lse_w);
    acc[c] += scale * (resp - prior);
    const double* mu = g.mean(c);
    const double* ls = g.log_stddev(c);
    double* d_mu = acc + g.k + c * g.dim;
    double* d_ls = acc + g.k + g.k * g.dim + c * g.dim;
    for (std::size_t j = 0; j < g.dim; ++j) {
      const bool clamped = ls[j] < kMinLogStddev;
      const double s = clamped ? kMinLogStddev : ls[j];
      const double inv = std::exp(-s);
      const double z = (x[j] - mu[j]) * inv;
      d_mu[j] += scale * resp * z * inv;
      if (!clamped) d_ls[j] += scale * resp * (z * z - 1.0);
    }
  }
  return log_p;
}

double mlp_forward_backward(const MlpShape& s, std::span<const double> theta, std::span<const double> x,
                            double scale, double* acc) {
  const std::size_t layers = s.widths.size();
  // activations[l] is the input to layer l; slopes[l] the activation derivative of its output.
  std::vector<std::vector<double>> activations(layers + 1);
  std::vector<std::vector<double>> slopes(layers);
  activations[0].assign(x.begin(), x.end());

  const double* p = theta.data();
  std::vector<const double*> layer_params(layers + 1);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = activations[l].size();
    const std::size_t out = s.widths[l];
    layer_params[l] = p;
    const double* w = p;
    const double* b = p + out * in;
    activations[l + 1].resize(out);
    slopes[l].resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * activations[l][i];
      const auto a = activate(s.activation, z);
      activations[l + 1][o] = a.value;
      slopes[l][o] = a.slope;
    }
    p += out * in + out;
  }
  layer_params[layers] = p;
  const auto& last = activations[layers];
  double f = p[last.size()];
  for (std::size_t i = 0; i < last.size(); ++i) f += p[i] * last[i];

  if (acc == nullptr) return f;

  // Output unit.
  const std::size_t out_offset = static_cast<std::size_t>(p - theta.data());
  for (std::size_t i = 0; i < last.size(); ++i) acc[out_offset + i] += scale * last[i];
  acc[out_offset + last.size()] += scale;

  std::vector<double> delta(last.size());
  for (std::size_t i = 0; i < last.size(); ++i) delta[i] = scale * p[i] * slopes[layers - 1][i];

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = activations[l].size();
    const std::size_t out = s.widths[l];
    const double* w = layer_params[l];
    const std::size_t offset = static_cast<std::size_t>(w - theta.data());
    double* gw = acc + offset;
    double* gb = gw + out * in;
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += delta[o] * activations[l][i];
      gb[o] += delta[o];
    }
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t i = 0; i < in; ++i) prev[i] += w[o * in + i] * delta[o];
    }
    for (std::size_t i = 0; i < in; ++i) prev[i] *= slopes[l - 1][i];
    delta = std::move(prev);
  }
  return f;
}

void check_dim(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: scorer expects dimension " +
                                                  std::to_string(expected) + ", got " + std::to_string(got));
  }
}

}  // namespace

std::size_t param_count(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearShape>) {
          return s.dim;
        } else if constexpr (std::is_same_v<T, MlpShape>) {
          return mlp_param_count(s);
        } else {
          return (s.k_pos + s.k_neg) * (1 + 2 * s.dim);
        }
      },
      shape);
}

std::vector<double> GmmParams::weights() const {
  std::vector<double> w(k);
  const double lse = log_sum_exp(log_weights);
  for (std::size_t c = 0; c < k; ++c) w[c] = std::exp(log_weights[c] - lse);
  return w;
}

double gmm_log_density(const GmmParams& g, std::span<const double> x) {
  check_dim(g.dim, x.size());
  std::vector<double> flat;
  flat.reserve(g.param_count());
  flat.insert(flat.end(), g.log_weights.begin(), g.log_weights.end());
  flat.insert(flat.end(), g.means.begin(), g.means.end());
  flat.insert(flat.end(), g.log_stddevs.begin(), g.log_stddevs.end());
  std::vector<double> terms(g.k);
  return gmm_component_terms({g.k, g.dim, flat.data()}, x, terms);
}

Scorer::Scorer(Shape shape, std::vector<double> params) : shape_(std::move(shape)), params_(std::move(params)) {
  validate_shape(shape_);
  if (params_.size() != param_count(shape_)) {
    throw Error(ErrorCode::BadShape, "BadShape: expected " + std::to_string(param_count(shape_)) +
                                         " parameters, got " + std::to_string(params_.size()));
  }
  for (double v : params_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::BadFormat, "scorer parameters must be finite");
  }
}

Family Scorer::family() const noexcept { return static_cast<Family>(shape_.index()); }

std::size_t Scorer::dim() const noexcept {
  return std::visit([](const auto& s) { return s.dim; }, shape_);
}

double Scorer::score(std::span<const double> x) const {
  check_dim(dim(), x.size());
  switch (family()) {
    case Family::Linear:
      return std::inner_product(x.begin(), x.end(), params_.begin(), 0.0);
    case Family::Mlp:
      return mlp_forward_backward(std::get<MlpShape>(shape_), params_, x, 0.0, nullptr);
    case Family::GmmRatio: {
      const auto& s = std::get<GmmShape>(shape_);
      const GmmView pos{s.k_pos, s.dim, params_.data()};
      const GmmView neg{s.k_neg, s.dim, params_.data() + pos.size()};
      std::vector<double> terms(std::max(s.k_pos, s.k_neg));
      const double lp = gmm_component_terms(pos, x, terms);
      const double ln = gmm_component_terms(neg, x, terms);
      return lp - ln;
    }
  }
  return 0.0;
}

double Scorer::accumulate_grad(std::span<const double> x, double scale, std::span<double> acc) const {
  check_dim(dim(), x.size());
  if (acc.size() != params_.size()) {
    throw Error(ErrorCode::LengthMismatch, "gradient buffer length differs from parameter count");
  }
  switch (family()) {
    case Family::Linear:
      for (std::size_t j = 0; j < x.size(); ++j) acc[j] += scale * x[j];
      return std::inner_product(x.begin(), x.end(), params_.begin(), 0.0);
    case Family::Mlp:
      return mlp_forward_backward(std::get<MlpShape>(shape_), params_, x, scale, acc.data());
    case Family::GmmRatio: {
      const auto& s = std::get<GmmShape>(shape_);
      const GmmView pos{s.k_pos, s.dim, params_.data()};
      const GmmView neg{s.k_neg, s.dim, params_.data() + pos.size()};
      const double lp = gmm_accumulate(pos, x, scale, acc.data());
      const double ln = gmm_accumulate(neg, x, -scale, acc.data() + pos.size());
      return lp - ln;
    }
  }
  return 0.0;
}

std::vector<double> Scorer::grad_params(std::span<const double> x) const {
  std::vector<double> g(params_.size(), 0.0);
  accumulate_grad(x, 1.0, g);
  return g;
}

std::vector<std::uint8_t> Scorer::l1_mask() const {
  std::vector<std::uint8_t> mask(params_.size(), 1);
  if (const auto* s = std::get_if<GmmShape>(&shape_)) {
    std::size_t offset = 0;
    for (std::size_t k : {s->k_pos, s->k_neg}) {
      // log_weights, then means (penalized), then log_stddevs
      std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(offset), k, 0);
      std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(offset + k + k * s->dim), k * s->dim, 0);
      offset += k * (1 + 2 * s->dim);
    }
  }
  return mask;
}

void Scorer::clamp_params() {
  if (const auto* s = std::get_if<GmmShape>(&shape_)) {
    std::size_t offset = 0;
    for (std::size_t k : {s->k_pos, s->k_neg}) {
      auto first = params_.begin() + static_cast<std::ptrdiff_t>(offset + k + k * s->dim);
      std::for_each(first, first + static_cast<std::ptrdiff_t>(k * s->dim),
                    [](double& v) { v = std::max(v, kMinLogStddev); });
      offset += k * (1 + 2 * s->dim);
    }
  }
}

Scorer init_linear(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::BadShape, "BadShape: input dimension must be >= 1");
  return Scorer(LinearShape{dim}, std::vector<double>(dim, 0.0));
}

Scorer init_mlp(std::size_t dim, std::vector<std::size_t> widths, Activation act, std::uint64_t seed) {
  MlpShape shape{dim, std::move(widths), act};
  validate_shape(shape);
  std::vector<double> params;
  params.reserve(mlp_param_count(shape));
  Rng rng(seed);
  std::size_t in = dim;
  const auto layer = [&](std::size_t out) {
    const double limit = std::sqrt(3.0 / static_cast<double>(in));
    for (std::size_t i = 0; i < out * in; ++i) params.push_back(rng.uniform(-limit, limit));
    params.insert(params.end(), out, 0.0);
    in = out;
  };
  for (std::size_t w : shape.widths) layer(w);
  layer(1);
  return Scorer(std::move(shape), std::move(params));
}

Scorer make_gmm_ratio(const GmmParams& pos, const GmmParams& neg) {
  if (pos.dim != neg.dim) throw Error(ErrorCode::DimensionMismatch, "class mixtures differ in dimension");
  std::vector<double> params;
  for (const GmmParams* g : {&pos, &neg}) {
    if (g->log_weights.size() != g->k || g->means.size() != g->k * g->dim ||
        g->log_stddevs.size() != g->k * g->dim) {
      throw Error(ErrorCode::BadShape, "BadShape: mixture arrays disagree with K and dimension");
    }
    params.insert(params.end(), g->log_weights.begin(), g->log_weights.end());
    params.insert(params.end(), g->means.begin(), g->means.end());
    params.insert(params.end(), g->log_stddevs.begin(), g->log_stddevs.end());
  }
  Scorer sc(GmmShape{pos.dim, pos.k, neg.k}, std::move(params));
  sc.clamp_params();
  return sc;
}

GmmParams gmm_block(const Scorer& sc, bool positive) {
  const auto& s = std::get<GmmShape>(sc.shape());
  const std::size_t k = positive ? s.k_pos : s.k_neg;
  const std::size_t offset = positive ? 0 : s.k_pos * (1 + 2 * s.dim);
  const auto p = sc.params().subspan(offset, k * (1 + 2 * s.dim));
  GmmParams g{k, s.dim, {}, {}, {}};
  g.log_weights.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k));
  g.means.assign(p.begin() + static_cast<std::ptrdiff_t>(k), p.begin() + static_cast<std::ptrdiff_t>(k + k * s.dim));
  g.log_stddevs.assign(p.begin() + static_cast<std::ptrdiff_t>(k + k * s.dim), p.end());
  return g;
}

}  // namespace pauc
