#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csrsa/inference.hpp"
#include "csrsa/model_compare.hpp"

namespace csrsa {

enum class SemanticsChoice { Empirical, Fixed, Interpolated };
enum class CostChoice { None, Fixed, Empirical };

inline std::string to_string(SemanticsChoice s) {
  switch (s) {
    case SemanticsChoice::Empirical: return "empirical";
    case SemanticsChoice::Fixed: return "fixed";
    case SemanticsChoice::Interpolated: return "interpolated";
  }
  return "?";
}

inline std::string to_string(CostChoice c) {
  switch (c) {
    case CostChoice::None: return "none";
    case CostChoice::Fixed: return "fixed";
    case CostChoice::Empirical: return "empirical";
  }
  return "?";
}

/// A named model family: its priors, how alternatives are enumerated, and a
/// binder turning a sampled parameter vector into runnable model parameters.
struct ModelVariant {
  std::string name;
  PriorSpec prior;
  AlternativePolicy policy{AlternativeMode::SizeColorGrid};
  std::function<ModelParams(std::span<const double>)> bind;

  ModelParams params_at(std::span<const double> theta) const {
    if (theta.size() != prior.dim())
      throw std::invalid_argument("parameter vector has wrong dimension for variant " + name);
    return bind(theta);
  }
};

/// Size/color scenes, fixed semantics, per-slot costs:
/// x_size, x_color in (0,1); bc_size, bc_color, beta_i in (0,40).
/// Without costs the two cost weights are dropped.
inline ModelVariant make_exp1_variant(bool with_cost = true) {
  ModelVariant v;
  v.name = with_cost ? "exp1" : "exp1-nocost";
  v.prior.params = {{"x_size", 0.0, 1.0}, {"x_color", 0.0, 1.0}};
  if (with_cost) {
    v.prior.params.push_back({"bc_size", 0.0, 40.0});
    v.prior.params.push_back({"bc_color", 0.0, 40.0});
  }
  v.prior.params.push_back({"beta_i", 0.0, 40.0});
  v.policy = AlternativePolicy{AlternativeMode::SizeColorGrid};
  v.bind = [with_cost](std::span<const double> t) {
    ModelParams p;
    FixedSemanticParams fx;
    fx.x_size = t[0];
    fx.x_color = t[1];
    fx.x_type = 1.0;
    p.lexicon.source = LexiconSource::Fixed;
    p.lexicon.fixed = fx;
    p.beta_t = 1.0;
    if (with_cost) {
      p.cost_model.kind = CostKind::FixedPerSlot;
      p.cost_model.per_slot = {{Slot::Size, t[2]}, {Slot::Color, t[3]}};
      p.beta_i = t[4];
    } else {
      p.beta_i = t[2];
    }
    return p;
  };
  return v;
}

/// Color-typicality scenes: a 3x3 family crossing the semantics source
/// (empirical table, fixed parameters, their interpolation) with the cost
/// treatment (none, per-slot weights, frequency/length regression).
inline ModelVariant make_exp2_variant(SemanticsChoice sem, CostChoice cost_choice,
                                      std::shared_ptr<const TypicalityTable> table,
                                      std::shared_ptr<const std::map<std::string, double>> frequency,
                                      std::shared_ptr<const std::map<std::string, double>> length) {
  if (sem != SemanticsChoice::Fixed && !table)
    throw std::invalid_argument("semantics choice needs a typicality table");
  if (cost_choice == CostChoice::Empirical && (!frequency || !length))
    throw std::invalid_argument("empirical costs need frequency and length tables");

  ModelVariant v;
  v.name = "exp2-" + to_string(sem) + "-" + to_string(cost_choice);
  int i_xc = -1, i_xt = -1, i_bf = -1;
  if (sem != SemanticsChoice::Empirical) {
    i_xc = static_cast<int>(v.prior.params.size());
    v.prior.params.push_back({"x_color", 0.0, 1.0});
    i_xt = static_cast<int>(v.prior.params.size());
    v.prior.params.push_back({"x_type", 0.0, 1.0});
  }
  if (sem == SemanticsChoice::Interpolated) {
    i_bf = static_cast<int>(v.prior.params.size());
    v.prior.params.push_back({"beta_fixed", 0.0, 1.0});
  }
  const int i_bi = static_cast<int>(v.prior.params.size());
  v.prior.params.push_back({"beta_i", 0.0, 40.0});
  const int i_bt = static_cast<int>(v.prior.params.size());
  v.prior.params.push_back({"beta_t", 0.0, 5.0});
  int i_c0 = -1, i_c1 = -1;
  if (cost_choice == CostChoice::Fixed) {
    i_c0 = static_cast<int>(v.prior.params.size());
    v.prior.params.push_back({"bc_color", 0.0, 40.0});
    i_c1 = static_cast<int>(v.prior.params.size());
    v.prior.params.push_back({"bc_type", 0.0, 40.0});
  } else if (cost_choice == CostChoice::Empirical) {
    i_c0 = static_cast<int>(v.prior.params.size());
    v.prior.params.push_back({"beta_frequency", 0.0, 5.0});
    i_c1 = static_cast<int>(v.prior.params.size());
    v.prior.params.push_back({"beta_length", 0.0, 5.0});
  }
  v.policy = AlternativePolicy{AlternativeMode::ContextualFeatures};
  v.bind = [=](std::span<const double> t) {
    ModelParams p;
    switch (sem) {
      case SemanticsChoice::Empirical:
        p.lexicon.source = LexiconSource::Empirical;
        p.lexicon.table = table;
        break;
      case SemanticsChoice::Fixed: {
        FixedSemanticParams fx;
        fx.x_size = 1.0;
        fx.x_color = t[static_cast<std::size_t>(i_xc)];
        fx.x_type = t[static_cast<std::size_t>(i_xt)];
        p.lexicon.source = LexiconSource::Fixed;
        p.lexicon.fixed = fx;
        break;
      }
      case SemanticsChoice::Interpolated: {
        FixedSemanticParams fx;
        fx.x_size = 1.0;
        fx.x_color = t[static_cast<std::size_t>(i_xc)];
        fx.x_type = t[static_cast<std::size_t>(i_xt)];
        p.lexicon.source = LexiconSource::Interpolated;
        p.lexicon.fixed = fx;
        p.lexicon.table = table;
        p.lexicon.beta_fixed = t[static_cast<std::size_t>(i_bf)];
        break;
      }
    }
    p.beta_i = t[static_cast<std::size_t>(i_bi)];
    p.beta_t = t[static_cast<std::size_t>(i_bt)];
    if (cost_choice == CostChoice::Fixed) {
      p.cost_model.kind = CostKind::FixedPerSlot;
      p.cost_model.per_slot = {{Slot::Color, t[static_cast<std::size_t>(i_c0)]},
                               {Slot::Type, t[static_cast<std::size_t>(i_c1)]}};
    } else if (cost_choice == CostChoice::Empirical) {
      p.cost_model.kind = CostKind::Empirical;
      p.cost_model.beta_frequency = t[static_cast<std::size_t>(i_c0)];
      p.cost_model.beta_length = t[static_cast<std::size_t>(i_c1)];
      p.cost_model.frequency = frequency;
      p.cost_model.length = length;
    }
    return p;
  };
  return v;
}

inline std::vector<ModelVariant> make_exp2_grid(
    std::shared_ptr<const TypicalityTable> table,
    std::shared_ptr<const std::map<std::string, double>> frequency,
    std::shared_ptr<const std::map<std::string, double>> length) {
  std::vector<ModelVariant> grid;
  for (SemanticsChoice s :
       {SemanticsChoice::Empirical, SemanticsChoice::Fixed, SemanticsChoice::Interpolated})
    for (CostChoice c : {CostChoice::None, CostChoice::Fixed, CostChoice::Empirical})
      grid.push_back(make_exp2_variant(s, c, table, frequency, length));
  return grid;
}

/// Taxonomy scenes: interpolated semantics whose fixed part is degenerate
/// (every true term scores 1), empirical costs.
/// beta_fixed in (0,1); beta_i in (0,20); beta_t, beta_frequency,
/// beta_length in (0,5).
inline ModelVariant make_exp3_variant(std::shared_ptr<const TypicalityTable> table,
                                      std::shared_ptr<const std::map<std::string, double>> frequency,
                                      std::shared_ptr<const std::map<std::string, double>> length) {
  if (!table) throw std::invalid_argument("taxonomy variant needs a typicality table");
  if (!frequency || !length)
    throw std::invalid_argument("taxonomy variant needs frequency and length tables");
  ModelVariant v;
  v.name = "exp3";
  v.prior.params = {{"beta_fixed", 0.0, 1.0},
                    {"beta_i", 0.0, 20.0},
                    {"beta_t", 0.0, 5.0},
                    {"beta_frequency", 0.0, 5.0},
                    {"beta_length", 0.0, 5.0}};
  v.policy = AlternativePolicy{AlternativeMode::TaxonomyLevels};
  v.bind = [=](std::span<const double> t) {
    ModelParams p;
    p.lexicon.source = LexiconSource::Interpolated;
    p.lexicon.fixed = FixedSemanticParams{1.0, 1.0, 1.0};
    p.lexicon.table = table;
    p.lexicon.beta_fixed = t[0];
    p.beta_i = t[1];
    p.beta_t = t[2];
    p.cost_model.kind = CostKind::Empirical;
    p.cost_model.beta_frequency = t[3];
    p.cost_model.beta_length = t[4];
    p.cost_model.frequency = frequency;
    p.cost_model.length = length;
    return p;
  };
  return v;
}

inline Trace fit(const ModelVariant& variant, const TrialLikelihood& likelihood,
                 const MhOptions& opt) {
  return mh_sample(
      variant.prior,
      [&](std::span<const double> theta) { return likelihood(variant.bind(theta)); }, opt);
}

inline AisResult ais_log_marginal(const ModelVariant& variant, const TrialLikelihood& likelihood,
                                  const AisConfig& cfg) {
  return ais_log_marginal(
      variant.prior,
      [&](std::span<const double> theta) { return likelihood(variant.bind(theta)); }, cfg);
}

inline double exact_log_marginal_grid(const ModelVariant& variant,
                                      const TrialLikelihood& likelihood, int points_per_dim = 201) {
  return exact_log_marginal_grid(
      variant.prior,
      [&](std::span<const double> theta) { return likelihood(variant.bind(theta)); },
      points_per_dim);
}

inline PredictionTable posterior_predictive(const ModelVariant& variant, const Trace& trace,
                                            const std::vector<Condition>& conditions) {
  return posterior_predictive(trace, conditions,
                              [&](std::span<const double> theta) { return variant.bind(theta); });
}

}  // namespace csrsa
