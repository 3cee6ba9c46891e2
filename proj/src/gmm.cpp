#include "pauc/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pauc/error.hpp"
#include "pauc/rng.hpp"

namespace pauc {

namespace {

std::vector<double> kmeanspp_centers(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> centers;
  centers.reserve(k * d);
  const auto take = [&](std::size_t i) {
    const auto r = x.row(i);
    centers.insert(centers.end(), r.begin(), r.end());
  };
  take(static_cast<std::size_t>(rng.below(n)));

  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    const double* last = centers.data() + (c - 1) * d;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = x.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += (r[j] - last[j]) * (r[j] - last[j]);
      dist2[i] = std::min(dist2[i], s);
      total += dist2[i];
    }
    if (total <= 0.0) {
      take(static_cast<std::size_t>(rng.below(n)));
      continue;
    }
    double target = rng.uniform() * total;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= dist2[i];
      if (target < 0.0) {
        pick = i;
        break;
      }
    }
    take(pick);
  }
  return centers;
}

// Fills resp (n x k) with responsibilities, returns the mean log-likelihood.
double e_step(const GmmParams& g, const Matrix& x, std::vector<double>& resp) {
  const std::size_t n = x.rows(), k = g.k;
  resp.assign(n * k, 0.0);
  std::vector<double> log_w(k);
  const auto w = g.weights();
  for (std::size_t c = 0; c < k; ++c) log_w[c] = std::log(w[c]);
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = x.row(i);
    double* t = resp.data() + i * k;
    for (std::size_t c = 0; c < k; ++c) {
      double v = log_w[c];
      for (std::size_t j = 0; j < g.dim; ++j) {
        const double s = std::max(g.log_stddevs[c * g.dim + j], std::log(kMinGmmStddev));
        const double z = (r[j] - g.means[c * g.dim + j]) * std::exp(-s);
        v -= half_log_2pi + s + 0.5 * z * z;
      }
      t[c] = v;
    }
    const double m = *std::max_element(t, t + k);
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += std::exp(t[c] - m);
    const double lse = m + std::log(s);
    for (std::size_t c = 0; c < k; ++c) t[c] = std::exp(t[c] - lse);
    total += lse;
  }
  return total / static_cast<double>(n);
}

}  // namespace

double gmm_mean_log_likelihood(const GmmParams& g, const Matrix& samples) {
  if (samples.cols() != g.dim) throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: sample dimension");
  std::vector<double> resp;
  return e_step(g, samples, resp);
}

EmResult fit_em(const Matrix& samples, std::size_t k, std::uint64_t seed, const EmOptions& opts) {
  const std::size_t n = samples.rows(), d = samples.cols();
  if (k == 0) throw Error(ErrorCode::BadShape, "BadShape: mixture needs K >= 1");
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "fit_em needs dimension >= 1");
  if (n < k) {
    throw Error(ErrorCode::TooFewSamples, "TooFewSamples: " + std::to_string(n) + " samples for K=" + std::to_string(k));
  }

  EmResult out;
  GmmParams& g = out.params;
  g.k = k;
  g.dim = d;
  Rng rng(seed);
  g.means = kmeanspp_centers(samples, k, rng);
  g.log_weights.assign(k, -std::log(static_cast<double>(k)));

  std::vector<double> pooled_mean(d, 0.0), pooled_var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) pooled_mean[j] += samples.row(i)[j];
  }
  for (auto& v : pooled_mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = samples.row(i)[j] - pooled_mean[j];
      pooled_var[j] += diff * diff;
    }
  }
  g.log_stddevs.resize(k * d);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      const double sd = std::sqrt(pooled_var[j] / static_cast<double>(n));
      g.log_stddevs[c * d + j] = std::log(std::max(sd, kMinGmmStddev));
    }
  }

  std::vector<double> resp;
  std::vector<bool> warned(k, false);
  for (std::size_t it = 0; it <= opts.max_iter; ++it) {
    const double ll = e_step(g, samples, resp);
    out.log_likelihood.push_back(ll);
    if (it > 0 && ll - out.log_likelihood[it - 1] < opts.tol) {
      out.converged = true;
      break;
    }
    if (it == opts.max_iter) break;

    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp[i * k + c];
      if (nk <= 1e-12 * static_cast<double>(n)) {
        // Component owns no data: keep its location, give it negligible weight.
        g.log_weights[c] = std::log(1e-300);
        if (!warned[c]) {
          out.warnings.push_back("DegenerateComponent: component " + std::to_string(c) + " lost all responsibility");
          warned[c] = true;
        }
        continue;
      }
      g.log_weights[c] = std::log(nk / static_cast<double>(n));
      double* mu = g.means.data() + c * d;
      std::fill(mu, mu + d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double r = resp[i * k + c];
        for (std::size_t j = 0; j < d; ++j) mu[j] += r * samples.row(i)[j];
      }
      for (std::size_t j = 0; j < d; ++j) mu[j] /= nk;
      for (std::size_t j = 0; j < d; ++j) {
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double diff = samples.row(i)[j] - mu[j];
          var += resp[i * k + c] * diff * diff;
        }
        double sd = std::sqrt(var / nk);
        if (sd < kMinGmmStddev) {
          sd = kMinGmmStddev;
          if (!warned[c]) {
            out.warnings.push_back("DegenerateComponent: component " + std::to_string(c) +
                                   " stddev floored at 1e-6");
            warned[c] = true;
          }
        }
        g.log_stddevs[c * d + j] = std::log(sd);
      }
    }
    out.iterations = it + 1;
  }
  return out;
}

Scorer init_gmm_ratio(const Dataset& ds, std::size_t k_pos, std::size_t k_neg, std::uint64_t seed,
                      const EmOptions& opts) {
  const auto pos = fit_em(ds.positives(), k_pos, seed, opts);
  const auto neg = fit_em(ds.negatives(), k_neg, seed + 1, opts);
  return make_gmm_ratio(pos.params, neg.params);
}

}  // namespace pauc
