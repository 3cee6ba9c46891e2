#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pauc {

enum class Family { Linear, Mlp, GmmRatio };
enum class Activation { Tanh, Selu };

const char* to_string(Family f);
const char* to_string(Activation a);
Family parse_family(const std::string& s);
Activation parse_activation(const std::string& s);

struct LinearShape {
  std::size_t dim;
  bool operator==(const LinearShape&) const = default;
};

// Hidden layer widths; a single linear output unit follows the last one.
struct MlpShape {
  std::size_t dim;
  std::vector<std::size_t> widths;
  Activation activation;
  bool operator==(const MlpShape&) const = default;
};

// Diagonal-covariance mixtures for the positive and negative class.
struct GmmShape {
  std::size_t dim;
  std::size_t k_pos;
  std::size_t k_neg;
  bool operator==(const GmmShape&) const = default;
};

using Shape = std::variant<LinearShape, MlpShape, GmmShape>;

std::size_t param_count(const Shape& shape);

// Lower bound on mixture component stddevs, applied as log_stddev >= log(floor).
constexpr double kMinGmmStddev = 1e-6;

// One class's mixture. Weights are stored as unnormalized logs (softmax on
// read) and stddevs as logs, so every real vector is a valid mixture.
struct GmmParams {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> log_weights;  // k
  std::vector<double> means;        // k * dim, row per component
  std::vector<double> log_stddevs;  // k * dim

  std::size_t param_count() const noexcept { return k * (1 + 2 * dim); }
  std::vector<double> weights() const;
  bool operator==(const GmmParams&) const = default;
};

// log sum_k w_k N(x; mu_k, diag(sigma_k^2)), evaluated with log-sum-exp.
double gmm_log_density(const GmmParams& g, std::span<const double> x);

// Scoring function f(x; theta) over a flat parameter vector.
//
//   Linear    theta . x
//   Mlp       feed-forward net, tanh/selu hidden layers, linear output unit;
//             per layer the weights (out x in, row-major) then the biases
//   GmmRatio  log p(x; theta+) - log p(x; theta-); theta+ block then theta-
//             block, each [log_weights, means, log_stddevs]
//
// Class priors are not represented: they only shift the score by a constant.
class Scorer {
 public:
  // Throws BadShape on a malformed shape or a parameter vector of the wrong
  // length, BadFormat on non-finite parameters.
  Scorer(Shape shape, std::vector<double> params);

  Family family() const noexcept;
  const Shape& shape() const noexcept { return shape_; }
  std::size_t dim() const noexcept;

  std::span<const double> params() const noexcept { return params_; }
  std::span<double> mutable_params() noexcept { return params_; }

  double score(std::span<const double> x) const;

  // acc += scale * df/dtheta (x); returns f(x).
  double accumulate_grad(std::span<const double> x, double scale, std::span<double> acc) const;
  std::vector<double> grad_params(std::span<const double> x) const;

  // 1 for parameters subject to L1 shrinkage. GMM log-weights and
  // log-stddevs are excluded.
  std::vector<std::uint8_t> l1_mask() const;

  // Re-establishes parameter constraints after an unconstrained update.
  void clamp_params();

  bool operator==(const Scorer&) const = default;

 private:
  Shape shape_;
  std::vector<double> params_;
};

Scorer init_linear(std::size_t dim);
// Weights ~ U(-sqrt(3/fan_in), sqrt(3/fan_in)), biases zero.
Scorer init_mlp(std::size_t dim, std::vector<std::size_t> widths, Activation act, std::uint64_t seed);
Scorer make_gmm_ratio(const GmmParams& pos, const GmmParams& neg);
GmmParams gmm_block(const Scorer& sc, bool positive);

}  // namespace pauc
