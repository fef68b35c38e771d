#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "csrsa/semantics.hpp"

namespace csrsa {

enum class CostKind { None, FixedPerSlot, Empirical };

/// Utterance cost. FixedPerSlot charges a per-slot weight summed over the
/// utterance's terms. Empirical charges beta_frequency * p(u) +
/// beta_length * l(u), with p and l pre-normalized to [0,1].
struct CostModel {
  CostKind kind = CostKind::None;
  std::map<Slot, double> per_slot;
  double beta_frequency = 0.0;
  double beta_length = 0.0;
  std::shared_ptr<const std::map<std::string, double>> frequency;
  std::shared_ptr<const std::map<std::string, double>> length;
};

inline double cost(const Utterance& u, const CostModel& model) {
  switch (model.kind) {
    case CostKind::None:
      return 0.0;
    case CostKind::FixedPerSlot: {
      double total = 0.0;
      for (const Term& t : u.terms()) {
        auto it = model.per_slot.find(t.slot);
        if (it != model.per_slot.end()) total += it->second;
      }
      return total;
    }
    case CostKind::Empirical: {
      if (!model.frequency || !model.length)
        throw std::invalid_argument("empirical cost model needs frequency and length tables");
      const std::string key = TypicalityTable::normalize_utterance_key(u.text());
      auto f = model.frequency->find(key);
      auto l = model.length->find(key);
      if (f == model.frequency->end() || l == model.length->end())
        throw std::invalid_argument("no empirical cost entry for utterance '" + u.text() + "'");
      return model.beta_frequency * f->second + model.beta_length * l->second;
    }
  }
  throw std::logic_error("unreachable cost kind");
}

/// Full parameter bundle of one model evaluation.
/// beta_i: informativity weight, beta_t: semantic concentration of the
/// continuous literal listener.
struct ModelParams {
  double beta_i = 1.0;
  double beta_t = 1.0;
  LexiconSpec lexicon;
  CostModel cost_model;
};

/// A discrete distribution paired with its support keys.
struct Distribution {
  std::vector<std::string> support;
  std::vector<double> p;

  double prob_of(const std::string& key) const {
    for (std::size_t i = 0; i < support.size(); ++i)
      if (support[i] == key) return p[i];
    throw std::invalid_argument("key '" + key + "' not in distribution support");
  }
};

namespace detail {

/// Unnormalized literal listener scores for every context object.
/// Boolean lexicons filter (prior * truth value); continuous lexicons weight
/// by prior * exp(beta_t * semantic value). The exponentiated form is what
/// reproduces the reference tables; the proportional form provably does not
/// (see the listener rule test).
inline std::vector<double> literal_scores(const ReferenceContext& ctx, const Utterance& u,
                                          const ModelParams& params) {
  std::vector<double> w;
  w.reserve(ctx.objects.size());
  for (const SceneObject& o : ctx.objects) {
    const double L = semantic_value(params.lexicon, u, o);
    const double prior = ctx.prior_of(o.id);
    w.push_back(params.lexicon.is_boolean() ? prior * L : prior * std::exp(params.beta_t * L));
  }
  return w;
}

}  // namespace detail

/// Literal listener: object distribution given an utterance.
inline Distribution literal_listener(const ReferenceContext& ctx, const Utterance& u,
                                     const ModelParams& params) {
  std::vector<double> w = detail::literal_scores(ctx, u, params);
  double total = 0.0;
  for (double v : w) total += v;
  if (total <= 0.0)
    throw std::invalid_argument("utterance '" + u.text() + "' is true of nothing in context " +
                                ctx.id);
  Distribution d;
  for (std::size_t i = 0; i < w.size(); ++i) {
    d.support.push_back(ctx.objects[i].id);
    d.p.push_back(w[i] / total);
  }
  return d;
}

/// Speaker utility: informativity about the referent minus utterance cost.
/// Returns -inf when the literal listener can never recover the referent.
inline double utility(const ReferenceContext& ctx, const Utterance& u,
                      const std::string& object_id, const ModelParams& params) {
  const int idx = ctx.index_of(object_id);
  if (idx < 0) throw std::invalid_argument("object " + object_id + " not in context " + ctx.id);
  std::vector<double> w = detail::literal_scores(ctx, u, params);
  double total = 0.0;
  for (double v : w) total += v;
  const double inf = std::numeric_limits<double>::infinity();
  if (total <= 0.0 || w[idx] <= 0.0) return -inf;
  return params.beta_i * std::log(w[idx] / total) - cost(u, params.cost_model);
}

/// Pragmatic speaker: soft-max over utilities of the alternative utterances.
inline Distribution speaker(const ReferenceContext& ctx, const std::string& object_id,
                            const ModelParams& params, const std::vector<Utterance>& alternatives) {
  if (alternatives.empty()) throw std::invalid_argument("speaker needs a non-empty alternative set");
  std::vector<double> utils;
  utils.reserve(alternatives.size());
  double best = -std::numeric_limits<double>::infinity();
  for (const Utterance& u : alternatives) {
    utils.push_back(utility(ctx, u, object_id, params));
    best = std::max(best, utils.back());
  }
  if (!std::isfinite(best))
    throw std::invalid_argument("no utterance can refer to " + object_id + " in context " + ctx.id);
  Distribution d;
  double total = 0.0;
  for (std::size_t i = 0; i < utils.size(); ++i) {
    const double w = std::isfinite(utils[i]) ? std::exp(utils[i] - best) : 0.0;
    d.support.push_back(alternatives[i].text());
    d.p.push_back(w);
    total += w;
  }
  for (double& v : d.p) v /= total;
  return d;
}

/// Pragmatic listener: inverts the speaker through the context prior.
inline Distribution pragmatic_listener(const ReferenceContext& ctx, const Utterance& u,
                                       const ModelParams& params,
                                       const std::vector<Utterance>& alternatives) {
  const std::string key = u.text();
  Distribution d;
  double total = 0.0;
  for (const SceneObject& o : ctx.objects) {
    double w = 0.0;
    try {
      w = speaker(ctx, o.id, params, alternatives).prob_of(key) * ctx.prior_of(o.id);
    } catch (const std::invalid_argument&) {
      w = 0.0;  // objects no utterance can refer to contribute nothing
    }
    d.support.push_back(o.id);
    d.p.push_back(w);
    total += w;
  }
  if (total <= 0.0)
    throw std::invalid_argument("no object yields speaker support for '" + key + "' in context " +
                                ctx.id);
  for (double& v : d.p) v /= total;
  return d;
}

/// One labeled scene plus the utterance alternatives in force for it.
struct Condition {
  ReferenceContext context;
  std::vector<Utterance> alternatives;
};

struct PredictionRow {
  std::string context_id;
  std::string utterance;
  double probability = 0.0;
  std::string aggregate_class;
};

/// Speaker predictions for the target of every condition, one row per
/// utterance alternative.
struct PredictionTable {
  std::vector<PredictionRow> rows;
};

inline PredictionTable prediction_table(const std::vector<Condition>& conditions,
                                        const ModelParams& params) {
  PredictionTable table;
  for (const Condition& cond : conditions) {
    const Distribution d = speaker(cond.context, cond.context.target_id, params, cond.alternatives);
    for (std::size_t i = 0; i < cond.alternatives.size(); ++i)
      table.rows.push_back({cond.context.id, cond.alternatives[i].text(), d.p[i],
                            cond.alternatives[i].aggregate_class()});
  }
  return table;
}

inline PredictionTable prediction_table(const std::vector<ReferenceContext>& contexts,
                                        const ModelParams& params, AlternativePolicy policy) {
  std::vector<Condition> conditions;
  conditions.reserve(contexts.size());
  for (const ReferenceContext& ctx : contexts)
    conditions.push_back({ctx, enumerate_alternatives(ctx, policy)});
  return prediction_table(conditions, params);
}

/// Total probability mass of rows in one context whose utterance mentions
/// the given slot (the redundancy measure used by the scene simulations).
inline double slot_mention_mass(const PredictionTable& table, const std::string& context_id,
                                const std::string& slot_name) {
  double mass = 0.0;
  bool seen = false;
  for (const PredictionRow& r : table.rows) {
    if (r.context_id != context_id) continue;
    seen = true;
    const std::string& cls = r.aggregate_class;
    std::size_t pos = 0;
    while ((pos = cls.find(slot_name, pos)) != std::string::npos) {
      const bool left_ok = pos == 0 || cls[pos - 1] == '-';
      const std::size_t end = pos + slot_name.size();
      const bool right_ok = end == cls.size() || cls[end] == '-';
      if (left_ok && right_ok) {
        mass += r.probability;
        break;
      }
      ++pos;
    }
  }
  if (!seen) throw std::invalid_argument("no prediction rows for context " + context_id);
  return mass;
}

}  // namespace csrsa
