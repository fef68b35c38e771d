#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "csrsa/inference.hpp"

namespace csrsa {

/// Number of worker threads to use: hardware concurrency capped by the
/// CSRSA_THREADS environment variable when set.
inline unsigned worker_threads() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("CSRSA_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
  }
  return n;
}

struct AisConfig {
  int chains = 100;
  int steps = 30000;
  double ladder_eps = 1e-6;
  double step_fraction = 0.05;
  std::uint64_t seed = 1;

  void validate() const {
    if (chains < 2) throw std::invalid_argument("ais needs at least two chains");
    if (steps < 2) throw std::invalid_argument("ais needs at least two ladder steps");
    if (!(ladder_eps > 0.0) || ladder_eps >= 1.0)
      throw std::invalid_argument("ais ladder epsilon must lie in (0, 1)");
  }
};

struct AisResult {
  double log_marginal = 0.0;
  double se = 0.0;
  std::vector<double> log_weights;
};

/// Annealing schedule: 0, then geometric spacing from `eps` up to 1.
inline std::vector<double> geometric_ladder(int steps, double eps) {
  std::vector<double> betas(static_cast<std::size_t>(steps));
  betas[0] = 0.0;
  const double log_eps = std::log(eps);
  for (int k = 1; k < steps; ++k)
    betas[static_cast<std::size_t>(k)] =
        std::exp(log_eps * (1.0 - static_cast<double>(k - 1) / static_cast<double>(steps - 2)));
  betas.back() = 1.0;
  return betas;
}

/// Annealed importance sampling estimate of the log marginal likelihood
/// under a uniform-box prior. Each chain starts at a prior draw and takes
/// one reflected random-walk transition per ladder temperature. Chains run
/// in parallel but are seeded per chain, so the estimate does not depend on
/// the thread count.
template <typename LogLik>
AisResult ais_log_marginal(const PriorSpec& prior, LogLik&& loglik, const AisConfig& cfg) {
  prior.validate();
  cfg.validate();
  const std::vector<double> betas = geometric_ladder(cfg.steps, cfg.ladder_eps);
  const std::size_t dim = prior.dim();

  std::vector<double> step(dim);
  for (std::size_t j = 0; j < dim; ++j)
    step[j] = cfg.step_fraction * (prior.params[j].hi - prior.params[j].lo);

  std::vector<double> logw(static_cast<std::size_t>(cfg.chains), 0.0);
  auto run_chain = [&](int chain) {
    Rng rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(chain)));
    std::vector<double> x = prior.sample(rng);
    double ll = loglik(std::span<const double>(x));
    double w = 0.0;
    std::vector<double> prop(dim);
    for (std::size_t k = 1; k < betas.size(); ++k) {
      const double beta = betas[k];
      if (std::isfinite(ll))
        w += (beta - betas[k - 1]) * ll;
      else
        w = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < dim; ++j)
        prop[j] = detail::reflect_into(x[j] + step[j] * rng.normal(), prior.params[j].lo,
                                       prior.params[j].hi);
      const double pll = loglik(std::span<const double>(prop));
      double ratio = beta * (pll - ll);
      if (!std::isfinite(pll)) ratio = -std::numeric_limits<double>::infinity();
      if (!std::isfinite(ll) && std::isfinite(pll)) ratio = std::numeric_limits<double>::infinity();
      if (std::log(rng.uniform() + 1e-300) < ratio) {
        x = prop;
        ll = pll;
      }
    }
    logw[static_cast<std::size_t>(chain)] = w;
  };

  const unsigned n_threads = std::min<unsigned>(worker_threads(), static_cast<unsigned>(cfg.chains));
  if (n_threads <= 1) {
    for (int c = 0; c < cfg.chains; ++c) run_chain(c);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (int c = next.fetch_add(1); c < cfg.chains; c = next.fetch_add(1)) run_chain(c);
      });
    for (std::thread& t : pool) t.join();
  }

  AisResult result;
  result.log_weights = logw;
  result.log_marginal = logsumexp(logw) - std::log(static_cast<double>(cfg.chains));
  const double m = *std::max_element(logw.begin(), logw.end());
  if (!std::isfinite(m)) throw std::runtime_error("all ais chains collapsed to zero weight");
  std::vector<double> a;
  a.reserve(logw.size());
  for (double v : logw) a.push_back(std::exp(v - m));
  result.se = std::sqrt(variance(a)) / (std::sqrt(static_cast<double>(cfg.chains)) * mean(a));
  return result;
}

/// Trapezoid-rule log marginal likelihood for models with at most three
/// parameters; the deterministic cross-check for the annealed estimator.
template <typename LogLik>
double exact_log_marginal_grid(const PriorSpec& prior, LogLik&& loglik, int points_per_dim = 201) {
  prior.validate();
  const std::size_t dim = prior.dim();
  if (dim > 3) throw std::invalid_argument("grid quadrature supports at most three parameters");
  if (points_per_dim < 2) throw std::invalid_argument("grid quadrature needs at least two points per dim");

  const std::size_t n = static_cast<std::size_t>(points_per_dim);
  std::vector<double> log_h(dim);
  for (std::size_t j = 0; j < dim; ++j)
    log_h[j] = std::log((prior.params[j].hi - prior.params[j].lo) / static_cast<double>(n - 1));

  std::vector<double> terms;
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> theta(dim);
  const std::size_t total = [&] {
    std::size_t t = 1;
    for (std::size_t j = 0; j < dim; ++j) t *= n;
    return t;
  }();
  terms.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double log_weight = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      idx[j] = rem % n;
      rem /= n;
      theta[j] = prior.params[j].lo + (prior.params[j].hi - prior.params[j].lo) *
                                          static_cast<double>(idx[j]) / static_cast<double>(n - 1);
      if (idx[j] == 0 || idx[j] == n - 1) log_weight += std::log(0.5);
      log_weight += log_h[j];
    }
    const double ll = loglik(std::span<const double>(theta));
    if (std::isfinite(ll)) terms.push_back(ll + log_weight);
  }
  if (terms.empty()) throw std::runtime_error("likelihood vanished on the whole quadrature grid");
  double log_volume = 0.0;
  for (std::size_t j = 0; j < dim; ++j) log_volume += std::log(prior.params[j].hi - prior.params[j].lo);
  return logsumexp(terms) - log_volume;
}

struct BayesFactor {
  double log_bf = 0.0;
  double log10_bf = 0.0;
  /// exp(log_bf); +inf when the ratio overflows double range.
  double value = 0.0;
};

inline BayesFactor bayes_factor(double log_marginal_a, double log_marginal_b) {
  BayesFactor bf;
  bf.log_bf = log_marginal_a - log_marginal_b;
  bf.log10_bf = bf.log_bf / std::log(10.0);
  bf.value = std::exp(bf.log_bf);
  return bf;
}

}  // namespace csrsa
