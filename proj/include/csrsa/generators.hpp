#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "csrsa/engine.hpp"
#include "csrsa/inference.hpp"
#include "csrsa/random.hpp"

namespace csrsa {

inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("linspace needs at least two points");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

inline SceneObject make_object(const std::string& id, const std::string& size,
                               const std::string& color, const std::string& type) {
  SceneObject o;
  o.id = id;
  if (!size.empty()) o.features.size = size;
  if (!color.empty()) o.features.color = color;
  o.features.type = type;
  return o;
}

/// The three-object size/color scene used throughout: a big blue pin, a
/// big red pin, and a small blue pin.
inline ReferenceContext gen_sizecolor_context(const std::string& target_id,
                                              const std::string& id = "sizecolor") {
  return make_context({make_object("big_blue", "big", "blue", "pin"),
                       make_object("big_red", "big", "red", "pin"),
                       make_object("small_blue", "small", "blue", "pin")},
                      target_id, {}, id);
}

/// Three-pin context in which the given slot suffices to single out the
/// target: size-sufficient targets the lone small pin, color-sufficient
/// targets the lone blue pin in the mirrored arrangement.
inline ReferenceContext gen_fig1_context(Slot sufficient) {
  if (sufficient == Slot::Size) return gen_sizecolor_context("small_blue", "fig1_size");
  if (sufficient == Slot::Color)
    return make_context({make_object("big_blue", "big", "blue", "pin"),
                         make_object("big_red", "big", "red", "pin"),
                         make_object("small_red", "small", "red", "pin")},
                        "big_blue", {}, "fig1_color");
  throw std::invalid_argument("fig1 context needs size or color as the sufficient slot");
}

/// Every size term, color term, and size-color pair attested on some object
/// in the context. For the three-object scene this yields seven utterances
/// (no object is both small and red).
inline std::vector<Utterance> attested_size_color_alternatives(const ReferenceContext& ctx) {
  std::set<Utterance> utts;
  for (const SceneObject& o : ctx.objects) {
    if (o.features.size) utts.insert(Utterance::single(Slot::Size, *o.features.size));
    if (o.features.color) utts.insert(Utterance::single(Slot::Color, *o.features.color));
    if (o.features.size && o.features.color)
      utts.insert(Utterance({Term{Slot::Size, *o.features.size}, Term{Slot::Color, *o.features.color}}));
  }
  if (utts.empty()) throw std::invalid_argument("no size or color features in context " + ctx.id);
  return {utts.begin(), utts.end()};
}

struct Sim1Cell {
  double x_size = 0.0;
  double x_color = 0.0;
  double beta_i = 0.0;
  ModelParams params;
  ReferenceContext context;
};

/// Cartesian product of semantic values and informativity weights, each cell
/// paired with the size-sufficient three-pin context and a zero-cost model.
inline std::vector<Sim1Cell> gen_sim1_grid(const std::vector<double>& x_size_values,
                                           const std::vector<double>& x_color_values,
                                           const std::vector<double>& beta_i_values) {
  if (x_size_values.empty() || x_color_values.empty() || beta_i_values.empty())
    throw std::invalid_argument("sim1 grid needs at least one value per axis");
  const ReferenceContext ctx = gen_fig1_context(Slot::Size);
  std::vector<Sim1Cell> cells;
  cells.reserve(x_size_values.size() * x_color_values.size() * beta_i_values.size());
  for (double bi : beta_i_values) {
    if (bi < 0.0) throw std::invalid_argument("beta_i must be nonnegative");
    for (double xs : x_size_values)
      for (double xc : x_color_values) {
        Sim1Cell cell;
        cell.x_size = xs;
        cell.x_color = xc;
        cell.beta_i = bi;
        cell.params.beta_i = bi;
        cell.params.beta_t = 1.0;
        FixedSemanticParams fixed{xs, xc, 1.0};
        fixed.validate();
        cell.params.lexicon.source = LexiconSource::Fixed;
        cell.params.lexicon.fixed = fixed;
        cell.context = ctx;
        cells.push_back(std::move(cell));
      }
  }
  return cells;
}

/// Four-object scenes from the scene-variation experiments. In the low
/// variation condition of the first pair everything shares size and color;
/// the high variation sibling varies both. The second pair manipulates
/// variation when color is never needed (types and sizes distinguish).
inline std::vector<ReferenceContext> gen_koolen_contexts() {
  std::vector<ReferenceContext> ctxs;
  ctxs.push_back(make_context({make_object("t", "big", "blue", "fan"),
                               make_object("d1", "big", "blue", "couch"),
                               make_object("d2", "big", "blue", "chair"),
                               make_object("d3", "big", "blue", "table")},
                              "t", {}, "exp1_low"));
  ctxs.push_back(make_context({make_object("t", "big", "blue", "fan"),
                               make_object("d1", "small", "blue", "couch"),
                               make_object("d2", "big", "red", "chair"),
                               make_object("d3", "small", "green", "table")},
                              "t", {}, "exp1_high"));
  ctxs.push_back(make_context({make_object("t", "big", "blue", "chair"),
                               make_object("d1", "small", "blue", "chair"),
                               make_object("d2", "big", "blue", "couch"),
                               make_object("d3", "small", "blue", "couch")},
                              "t", {}, "exp2_low"));
  ctxs.push_back(make_context({make_object("t", "small", "brown", "chair"),
                               make_object("d1", "big", "brown", "chair"),
                               make_object("d2", "small", "green", "couch"),
                               make_object("d3", "big", "red", "table")},
                              "t", {}, "exp2_high"));
  return ctxs;
}

inline std::vector<Condition> gen_koolen_conditions() {
  std::vector<Condition> conds;
  for (const ReferenceContext& ctx : gen_koolen_contexts())
    conds.push_back({ctx, enumerate_alternatives(ctx, {AlternativeMode::ContextualFeatures})});
  return conds;
}

/// Scene-variation sweep: a small blue target against `a` distractors of
/// which `b` share the redundant feature. Size-sufficient scenes make all
/// distractors big (b blue, a-b red); color-sufficient scenes make all
/// distractors red (b small, a-b big). Ids follow "size-3-2" style.
inline ReferenceContext gen_sweep_context(int a, int b, bool size_sufficient) {
  if (a < 1 || b < 1 || b > a) throw std::invalid_argument("sweep condition needs 1 <= b <= a");
  std::vector<SceneObject> objs;
  objs.push_back(make_object("t", "small", "blue", "pin"));
  for (int i = 0; i < a; ++i) {
    const std::string id = "d" + std::to_string(i);
    if (size_sufficient)
      objs.push_back(make_object(id, "big", i < b ? "blue" : "red", "pin"));
    else
      objs.push_back(make_object(id, i < b ? "small" : "big", "red", "pin"));
  }
  const std::string id = std::string(size_sufficient ? "size" : "color") + "-" +
                         std::to_string(a) + "-" + std::to_string(b);
  return make_context(objs, "t", {}, id);
}

/// All 18 sweep conditions (size- then color-sufficient, a in 2..4,
/// b in 1..a) with the full size-color utterance grid as alternatives.
inline std::vector<Condition> gen_variation_sweep() {
  std::vector<Condition> conds;
  for (bool size_sufficient : {true, false})
    for (int a = 2; a <= 4; ++a)
      for (int b = 1; b <= a; ++b) {
        ReferenceContext ctx = gen_sweep_context(a, b, size_sufficient);
        std::vector<Utterance> alts = enumerate_alternatives(ctx, {AlternativeMode::SizeColorGrid});
        conds.push_back({std::move(ctx), std::move(alts)});
      }
  return conds;
}

/// Whole-utterance typicality values for the banana scenes.
inline std::shared_ptr<const TypicalityTable> gen_banana_table() {
  std::vector<TypicalityRow> rows;
  const std::vector<std::string> objects = {"yellow_banana", "brown_banana", "blue_banana", "other1",
                                            "other2"};
  auto add = [&](const std::string& utt, double y, double br, double bl) {
    const double vals[5] = {y, br, bl, 0.01, 0.01};
    for (std::size_t i = 0; i < objects.size(); ++i) rows.push_back({utt, objects[i], vals[i]});
  };
  add("banana", 0.9, 0.35, 0.1);
  add("yellow banana", 0.99, 0.01, 0.01);
  add("brown banana", 0.01, 0.99, 0.01);
  add("blue banana", 0.01, 0.01, 0.99);
  return std::make_shared<TypicalityTable>(load_typicality_table(rows));
}

/// One condition per banana color: the colored banana against two filler
/// objects, with the bare type term and the color-modified term as the
/// alternatives.
inline std::vector<Condition> gen_banana_conditions() {
  std::vector<Condition> conds;
  for (const std::string& color : {std::string("yellow"), std::string("brown"), std::string("blue")}) {
    ReferenceContext ctx = make_context({make_object(color + "_banana", "", color, "banana"),
                                         make_object("other1", "", "", "thing"),
                                         make_object("other2", "", "", "thing")},
                                        color + "_banana", {}, color + "_banana_scene");
    std::vector<Utterance> alts = {
        Utterance::single(Slot::Type, "banana"),
        Utterance({Term{Slot::Color, color}, Term{Slot::Type, "banana"}})};
    conds.push_back({std::move(ctx), std::move(alts)});
  }
  return conds;
}

inline ModelParams gen_banana_params() {
  ModelParams p;
  p.lexicon.source = LexiconSource::Empirical;
  p.lexicon.table = gen_banana_table();
  p.beta_i = 12.0;
  p.beta_t = 1.0;
  p.cost_model.kind = CostKind::FixedPerSlot;
  p.cost_model.per_slot = {{Slot::Size, 5.0}, {Slot::Color, 5.0}, {Slot::Type, 5.0}};
  return p;
}

struct TaxonomyFixture {
  ReferenceContext context;
  std::shared_ptr<const TypicalityTable> table;
  std::shared_ptr<const std::map<std::string, double>> frequency;
  std::shared_ptr<const std::map<std::string, double>> length;
};

/// A dalmatian among a cat and a car, nameable at three taxonomy levels.
inline TaxonomyFixture gen_taxonomy_fixture() {
  SceneObject t = make_object("t", "", "", "dog");
  t.features.taxonomy = Taxonomy{"dalmatian", "dog", "animal"};
  SceneObject d1 = make_object("d1", "", "", "cat");
  d1.features.taxonomy = Taxonomy{"siamese", "cat", "animal"};
  SceneObject d2 = make_object("d2", "", "", "car");
  d2.features.taxonomy = Taxonomy{"sedan", "car", "vehicle"};
  TaxonomyFixture fx;
  fx.context = make_context({t, d1, d2}, "t", {}, "taxonomy_demo");
  std::vector<TypicalityRow> rows = {
      {"dalmatian", "t", 0.95}, {"dalmatian", "d1", 0.01}, {"dalmatian", "d2", 0.01},
      {"dog", "t", 0.90},       {"dog", "d1", 0.05},       {"dog", "d2", 0.01},
      {"animal", "t", 0.85},    {"animal", "d1", 0.80},    {"animal", "d2", 0.01}};
  fx.table = std::make_shared<TypicalityTable>(load_typicality_table(rows));
  fx.frequency = std::make_shared<std::map<std::string, double>>(
      std::map<std::string, double>{{"dalmatian", 0.1}, {"dog", 0.9}, {"animal", 0.6}});
  fx.length = std::make_shared<std::map<std::string, double>>(
      std::map<std::string, double>{{"dalmatian", 1.0}, {"dog", 0.33}, {"animal", 0.67}});
  return fx;
}

/// Draw production trials from the speaker distribution of each condition,
/// spreading `n_total` as evenly as the condition count allows.
inline std::vector<Trial> synthesize_trials(const std::vector<Condition>& conditions,
                                            const ModelParams& params, int n_total,
                                            std::uint64_t seed) {
  if (conditions.empty()) throw std::invalid_argument("no conditions to synthesize from");
  if (n_total < 1) throw std::invalid_argument("need at least one trial");
  Rng rng(seed);
  std::vector<Trial> trials;
  trials.reserve(static_cast<std::size_t>(n_total));
  const int base = n_total / static_cast<int>(conditions.size());
  const int extra = n_total % static_cast<int>(conditions.size());
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    const Condition& cond = conditions[c];
    const Distribution d = speaker(cond.context, cond.context.target_id, params, cond.alternatives);
    const int n = base + (static_cast<int>(c) < extra ? 1 : 0);
    for (int i = 0; i < n; ++i) {
      double u = rng.uniform();
      std::size_t pick = d.p.size() - 1;
      for (std::size_t j = 0; j < d.p.size(); ++j) {
        if (u < d.p[j]) {
          pick = j;
          break;
        }
        u -= d.p[j];
      }
      trials.push_back({cond.context.id, d.support[pick]});
    }
  }
  return trials;
}

}  // namespace csrsa
