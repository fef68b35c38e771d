#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csrsa/engine.hpp"
#include "csrsa/random.hpp"
#include "csrsa/stats.hpp"

namespace csrsa {

/// Production observations: which coded utterance was produced for the
/// target of the named context, aggregated with a count.
struct Trial {
  std::string context_id;
  std::string coded_utterance;
  int count = 1;
};

struct ParamBounds {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
};

/// Independent uniform priors over a named parameter vector.
struct PriorSpec {
  std::vector<ParamBounds> params;

  std::size_t dim() const { return params.size(); }

  void validate() const {
    if (params.empty()) throw std::invalid_argument("prior needs at least one parameter");
    for (const ParamBounds& b : params)
      if (!(b.hi > b.lo)) throw std::invalid_argument("prior bounds for " + b.name + " are empty");
  }

  double log_density(std::span<const double> theta) const {
    if (theta.size() != params.size()) throw std::invalid_argument("prior dimension mismatch");
    double ld = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (theta[i] < params[i].lo || theta[i] > params[i].hi)
        return -std::numeric_limits<double>::infinity();
      ld -= std::log(params[i].hi - params[i].lo);
    }
    return ld;
  }

  std::vector<double> sample(Rng& rng) const {
    std::vector<double> theta(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) theta[i] = rng.uniform(params[i].lo, params[i].hi);
    return theta;
  }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i].name == name) return static_cast<int>(i);
    return -1;
  }
};

struct MhOptions {
  int burn_in = 10000;
  int lag = 10;
  int samples = 2000;
  int init_draws = 1000;
  /// Burn-in step adaptation: every `adapt_window` proposals the shared step
  /// scale (a fraction of each prior width) is grown by 1.5x when acceptance
  /// exceeds `adapt_hi` and shrunk by 1.5x below `adapt_lo`. The scale
  /// freezes once burn-in ends so the kept chain is a fixed-kernel Markov
  /// chain.
  int adapt_window = 200;
  double adapt_lo = 0.2;
  double adapt_hi = 0.4;
  double step_fraction = 0.05;
  double step_scale_cap = 2.0;
  double step_scale_floor = 1e-4;
  std::uint64_t seed = 1;

  void validate() const {
    if (burn_in < 0 || lag < 1 || samples < 1 || init_draws < 1)
      throw std::invalid_argument("invalid sampler schedule");
    if (adapt_window < 1 || !(adapt_hi > adapt_lo))
      throw std::invalid_argument("invalid adaptation settings");
  }
};

struct TraceMeta {
  double acceptance_rate = 0.0;
  double step_scale = 0.0;
  std::uint64_t seed = 0;
  int burn_in = 0;
  int lag = 0;
};

struct Trace {
  std::vector<std::string> param_names;
  std::vector<std::vector<double>> draws;
  std::vector<double> log_post;
  TraceMeta meta;

  std::vector<double> column(const std::string& name) const {
    for (std::size_t j = 0; j < param_names.size(); ++j) {
      if (param_names[j] != name) continue;
      std::vector<double> c;
      c.reserve(draws.size());
      for (const auto& row : draws) c.push_back(row[j]);
      return c;
    }
    throw std::invalid_argument("no parameter named " + name + " in trace");
  }
};

namespace detail {

inline double reflect_into(double x, double lo, double hi) {
  const double width = hi - lo;
  while (x < lo || x > hi) {
    if (x < lo) x = 2.0 * lo - x;
    if (x > hi) x = 2.0 * hi - x;
    if (!std::isfinite(x)) return lo + 0.5 * width;
  }
  return x;
}

}  // namespace detail

/// Random-walk Metropolis over a uniform-box prior. Proposals are joint
/// Gaussian steps reflected at the prior bounds; `loglik` maps a parameter
/// vector to a log likelihood (may return -inf).
template <typename LogLik>
Trace mh_sample(const PriorSpec& prior, LogLik&& loglik, const MhOptions& opt) {
  prior.validate();
  opt.validate();
  Rng rng(opt.seed);
  const std::size_t dim = prior.dim();

  auto log_post = [&](std::span<const double> theta) {
    const double lp = prior.log_density(theta);
    if (!std::isfinite(lp)) return lp;
    const double ll = loglik(theta);
    return std::isfinite(ll) ? lp + ll : -std::numeric_limits<double>::infinity();
  };

  std::vector<double> cur = prior.sample(rng);
  double cur_lp = log_post(cur);
  for (int i = 1; i < opt.init_draws; ++i) {
    std::vector<double> cand = prior.sample(rng);
    const double lp = log_post(cand);
    if (lp > cur_lp) {
      cur = std::move(cand);
      cur_lp = lp;
    }
  }
  if (!std::isfinite(cur_lp))
    throw std::runtime_error("no prior draw had finite posterior density; check data and model");

  std::vector<double> width(dim);
  for (std::size_t j = 0; j < dim; ++j) width[j] = prior.params[j].hi - prior.params[j].lo;
  double scale = opt.step_fraction;

  Trace trace;
  for (const ParamBounds& b : prior.params) trace.param_names.push_back(b.name);
  trace.draws.reserve(static_cast<std::size_t>(opt.samples));
  trace.log_post.reserve(static_cast<std::size_t>(opt.samples));

  const long total = static_cast<long>(opt.burn_in) + static_cast<long>(opt.lag) * opt.samples;
  long kept_accepts = 0, kept_proposals = 0;
  int window_accepts = 0, window_count = 0;
  std::vector<double> prop(dim);

  for (long it = 0; it < total; ++it) {
    for (std::size_t j = 0; j < dim; ++j)
      prop[j] = detail::reflect_into(cur[j] + scale * width[j] * rng.normal(), prior.params[j].lo,
                                     prior.params[j].hi);
    const double prop_lp = log_post(prop);
    const bool accept = std::log(rng.uniform() + 1e-300) < prop_lp - cur_lp;
    if (accept) {
      cur = prop;
      cur_lp = prop_lp;
    }

    if (it < opt.burn_in) {
      window_accepts += accept ? 1 : 0;
      if (++window_count == opt.adapt_window) {
        const double rate = static_cast<double>(window_accepts) / window_count;
        if (rate > opt.adapt_hi) scale = std::min(scale * 1.5, opt.step_scale_cap);
        if (rate < opt.adapt_lo) scale = std::max(scale / 1.5, opt.step_scale_floor);
        window_accepts = 0;
        window_count = 0;
      }
    } else {
      ++kept_proposals;
      kept_accepts += accept ? 1 : 0;
      if ((it - opt.burn_in + 1) % opt.lag == 0) {
        trace.draws.push_back(cur);
        trace.log_post.push_back(cur_lp);
      }
    }
  }

  trace.meta.acceptance_rate =
      kept_proposals ? static_cast<double>(kept_accepts) / static_cast<double>(kept_proposals) : 0.0;
  trace.meta.step_scale = scale;
  trace.meta.seed = opt.seed;
  trace.meta.burn_in = opt.burn_in;
  trace.meta.lag = opt.lag;
  return trace;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

/// Highest-density interval: the narrowest window covering ceil(mass * n)
/// sorted samples. Ties go to the lower window.
inline Interval hdi(std::vector<double> samples, double mass = 0.95) {
  if (samples.empty()) throw std::invalid_argument("hdi of empty sample");
  if (!(mass > 0.0) || mass > 1.0) throw std::invalid_argument("hdi mass must be in (0, 1]");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n);
  std::size_t best = 0;
  double best_width = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + k <= n; ++i) {
    const double width = samples[i + k - 1] - samples[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {samples[best], samples[best + k - 1]};
}

/// Posterior mode estimate: the draw with the highest log posterior density,
/// earliest draw on ties.
inline std::vector<double> map_estimate(const Trace& trace) {
  if (trace.draws.empty()) throw std::invalid_argument("map_estimate of empty trace");
  std::size_t best = 0;
  for (std::size_t i = 1; i < trace.log_post.size(); ++i)
    if (trace.log_post[i] > trace.log_post[best]) best = i;
  return trace.draws[best];
}

/// Pre-aggregated production data: per condition, counts of each observed
/// utterance, ready for fast repeated likelihood evaluation. Empty data is
/// allowed and yields a flat (zero) log likelihood.
class TrialLikelihood {
 public:
  TrialLikelihood(std::vector<Condition> conditions, const std::vector<Trial>& trials)
      : conditions_(std::move(conditions)) {
    if (conditions_.empty()) throw std::invalid_argument("likelihood needs at least one condition");
    std::map<std::string, std::size_t> by_context;
    for (std::size_t c = 0; c < conditions_.size(); ++c) {
      if (!by_context.emplace(conditions_[c].context.id, c).second)
        throw std::invalid_argument("duplicate condition for context " + conditions_[c].context.id);
    }
    counts_.resize(conditions_.size());
    for (std::size_t c = 0; c < conditions_.size(); ++c)
      counts_[c].assign(conditions_[c].alternatives.size(), 0.0);
    for (const Trial& t : trials) {
      if (t.count < 1) throw std::invalid_argument("trial count must be positive");
      auto it = by_context.find(t.context_id);
      if (it == by_context.end())
        throw std::invalid_argument("trial references unknown context " + t.context_id);
      const std::size_t c = it->second;
      const auto& alts = conditions_[c].alternatives;
      bool matched = false;
      for (std::size_t u = 0; u < alts.size(); ++u) {
        if (alts[u].text() == t.coded_utterance) {
          counts_[c][u] += static_cast<double>(t.count);
          matched = true;
          break;
        }
      }
      if (!matched)
        throw std::invalid_argument("trial utterance '" + t.coded_utterance +
                                    "' is not an alternative in context " + t.context_id);
      n_trials_ += static_cast<std::size_t>(t.count);
    }
  }

  const std::vector<Condition>& conditions() const { return conditions_; }
  std::size_t n_trials() const { return n_trials_; }

  /// Multinomial log likelihood of the observed productions under the
  /// speaker distribution induced by `params`. Conditions without data
  /// contribute nothing, so an empty dataset scores 0 everywhere.
  double operator()(const ModelParams& params) const {
    double ll = 0.0;
    for (std::size_t c = 0; c < conditions_.size(); ++c) {
      bool any = false;
      for (double v : counts_[c]) any |= v > 0.0;
      if (!any) continue;
      const Condition& cond = conditions_[c];
      Distribution s;
      try {
        s = speaker(cond.context, cond.context.target_id, params, cond.alternatives);
      } catch (const std::invalid_argument&) {
        return -std::numeric_limits<double>::infinity();
      }
      for (std::size_t u = 0; u < counts_[c].size(); ++u) {
        if (counts_[c][u] == 0.0) continue;
        if (s.p[u] <= 0.0) return -std::numeric_limits<double>::infinity();
        ll += counts_[c][u] * std::log(s.p[u]);
      }
    }
    return ll;
  }

  /// Observed production proportions aligned with prediction_table row order.
  PredictionTable empirical_table() const {
    PredictionTable table;
    for (std::size_t c = 0; c < conditions_.size(); ++c) {
      double total = 0.0;
      for (double v : counts_[c]) total += v;
      for (std::size_t u = 0; u < counts_[c].size(); ++u) {
        const double p = total > 0.0 ? counts_[c][u] / total : 0.0;
        table.rows.push_back({conditions_[c].context.id, conditions_[c].alternatives[u].text(), p,
                              conditions_[c].alternatives[u].aggregate_class()});
      }
    }
    return table;
  }

 private:
  std::vector<Condition> conditions_;
  std::vector<std::vector<double>> counts_;
  std::size_t n_trials_ = 0;
};

/// Posterior predictive: the prediction table evaluated at the joint-MAP
/// retained sample.
template <typename Bind>
PredictionTable posterior_predictive(const Trace& trace, const std::vector<Condition>& conditions,
                                     Bind&& bind) {
  const std::vector<double> theta = map_estimate(trace);
  return prediction_table(conditions, bind(std::span<const double>(theta)));
}

/// Pearson correlation between two prediction tables over matched
/// (context, utterance) keys; the key sets must coincide.
inline double correlate(const PredictionTable& a, const PredictionTable& b) {
  if (a.rows.size() != b.rows.size()) throw std::invalid_argument("correlate: table size mismatch");
  if (a.rows.size() < 3) throw std::invalid_argument("correlate needs at least three cells");
  std::map<std::pair<std::string, std::string>, double> lookup;
  for (const PredictionRow& r : b.rows)
    if (!lookup.emplace(std::make_pair(r.context_id, r.utterance), r.probability).second)
      throw std::invalid_argument("correlate: duplicate key " + r.context_id + "/" + r.utterance);
  std::vector<double> x, y;
  x.reserve(a.rows.size());
  y.reserve(a.rows.size());
  for (const PredictionRow& r : a.rows) {
    auto it = lookup.find({r.context_id, r.utterance});
    if (it == lookup.end())
      throw std::invalid_argument("correlate: key " + r.context_id + "/" + r.utterance +
                                  " missing from second table");
    x.push_back(r.probability);
    y.push_back(it->second);
  }
  return pearson(x, y);
}

}  // namespace csrsa
