#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csrsa/csrsa.hpp"

namespace {

using namespace csrsa;

struct SharedArgs {
  std::string gen;
  std::string contexts_path;
  std::string typicality_path;
  std::string costs_path;
  std::string alternatives;  // empty = pick a default for the scene set
};

std::vector<ReferenceContext> load_contexts(const SharedArgs& args) {
  if (!args.contexts_path.empty()) return read_contexts_json(args.contexts_path);
  if (args.gen == "fig1")
    return {gen_fig1_context(Slot::Size), gen_fig1_context(Slot::Color)};
  if (args.gen == "sizecolor")
    return {gen_sizecolor_context("big_blue", "sizecolor_big_blue"),
            gen_sizecolor_context("big_red", "sizecolor_big_red"),
            gen_sizecolor_context("small_blue", "sizecolor_small_blue")};
  if (args.gen == "koolen") return gen_koolen_contexts();
  if (args.gen == "sweep") {
    std::vector<ReferenceContext> ctxs;
    for (const Condition& c : gen_variation_sweep()) ctxs.push_back(c.context);
    return ctxs;
  }
  if (args.gen == "banana") {
    std::vector<ReferenceContext> ctxs;
    for (const Condition& c : gen_banana_conditions()) ctxs.push_back(c.context);
    return ctxs;
  }
  if (args.gen == "taxonomy") return {gen_taxonomy_fixture().context};
  throw std::runtime_error(
      "need --contexts FILE or --gen {fig1|sizecolor|koolen|sweep|banana|taxonomy}");
}

std::string default_alternatives(const SharedArgs& args) {
  if (args.gen == "fig1" || args.gen == "sizecolor") return "attested";
  if (args.gen == "koolen") return "contextual";
  if (args.gen == "taxonomy") return "taxonomy";
  return "grid";
}

std::vector<Condition> build_conditions(const SharedArgs& args,
                                        const std::vector<ReferenceContext>& ctxs) {
  if (args.gen == "banana" && args.contexts_path.empty()) return gen_banana_conditions();
  const std::string mode = args.alternatives.empty() ? default_alternatives(args) : args.alternatives;
  std::vector<Condition> conds;
  for (const ReferenceContext& ctx : ctxs) {
    std::vector<Utterance> alts;
    if (mode == "grid")
      alts = enumerate_alternatives(ctx, {AlternativeMode::SizeColorGrid});
    else if (mode == "contextual")
      alts = enumerate_alternatives(ctx, {AlternativeMode::ContextualFeatures});
    else if (mode == "taxonomy")
      alts = enumerate_alternatives(ctx, {AlternativeMode::TaxonomyLevels});
    else if (mode == "attested")
      alts = attested_size_color_alternatives(ctx);
    else
      throw std::runtime_error("unknown alternative mode " + mode);
    conds.push_back({ctx, std::move(alts)});
  }
  return conds;
}

/// Variant-driven commands fall back to the variant's own alternative policy.
std::vector<Condition> build_variant_conditions(const SharedArgs& args,
                                                const std::vector<ReferenceContext>& ctxs,
                                                const ModelVariant& variant) {
  if (!args.alternatives.empty()) return build_conditions(args, ctxs);
  std::vector<Condition> conds;
  for (const ReferenceContext& ctx : ctxs)
    conds.push_back({ctx, enumerate_alternatives(ctx, variant.policy)});
  return conds;
}

ModelVariant build_variant(const std::string& name, const SharedArgs& args) {
  std::shared_ptr<const TypicalityTable> table;
  if (!args.typicality_path.empty())
    table = std::make_shared<TypicalityTable>(read_typicality_csv(args.typicality_path));
  CostTables costs;
  if (!args.costs_path.empty()) costs = read_costs_csv(args.costs_path);

  if (name == "exp1") return make_exp1_variant(true);
  if (name == "exp1-nocost") return make_exp1_variant(false);
  if (name == "exp3") {
    if (!table && args.gen == "taxonomy") {
      TaxonomyFixture fx = gen_taxonomy_fixture();
      return make_exp3_variant(fx.table, fx.frequency, fx.length);
    }
    return make_exp3_variant(table, costs.frequency, costs.length);
  }
  const std::string prefix = "exp2-";
  if (name.rfind(prefix, 0) == 0) {
    const std::string rest = name.substr(prefix.size());
    const std::size_t dash = rest.find('-');
    if (dash != std::string::npos) {
      const std::string sem = rest.substr(0, dash);
      const std::string cost = rest.substr(dash + 1);
      auto sem_choice = sem == "empirical"      ? SemanticsChoice::Empirical
                        : sem == "fixed"        ? SemanticsChoice::Fixed
                        : sem == "interpolated" ? SemanticsChoice::Interpolated
                                                : throw std::runtime_error("unknown semantics " + sem);
      auto cost_choice = cost == "none"        ? CostChoice::None
                         : cost == "fixed"     ? CostChoice::Fixed
                         : cost == "empirical" ? CostChoice::Empirical
                                               : throw std::runtime_error("unknown cost " + cost);
      if (!table && args.typicality_path.empty()) table = gen_banana_table();
      return make_exp2_variant(sem_choice, cost_choice, table, costs.frequency, costs.length);
    }
  }
  throw std::runtime_error("unknown variant " + name +
                           " (try exp1, exp1-nocost, exp2-<sem>-<cost>, exp3)");
}

ModelParams build_manual_params(double x_size, double x_color, double x_type, double beta_i,
                                double beta_t, const std::string& semantics,
                                const std::string& cost_kind, double cost_size, double cost_color,
                                double cost_type, const SharedArgs& args) {
  ModelParams p;
  if (semantics == "boolean") {
    p.lexicon.source = LexiconSource::Boolean;
  } else if (semantics == "fixed") {
    p.lexicon.source = LexiconSource::Fixed;
    p.lexicon.fixed = FixedSemanticParams{x_size, x_color, x_type};
  } else if (semantics == "empirical") {
    p.lexicon.source = LexiconSource::Empirical;
    p.lexicon.table = args.typicality_path.empty()
                          ? gen_banana_table()
                          : std::make_shared<TypicalityTable>(read_typicality_csv(args.typicality_path));
  } else {
    throw std::runtime_error("unknown semantics " + semantics);
  }
  p.beta_i = beta_i;
  p.beta_t = beta_t;
  if (cost_kind == "perslot") {
    p.cost_model.kind = CostKind::FixedPerSlot;
    p.cost_model.per_slot = {{Slot::Size, cost_size}, {Slot::Color, cost_color},
                             {Slot::Type, cost_type}, {Slot::Sub, cost_type},
                             {Slot::Basic, cost_type}, {Slot::Super, cost_type}};
  } else if (cost_kind != "none") {
    throw std::runtime_error("unknown cost kind " + cost_kind);
  }
  return p;
}

void print_trace_summary(const ModelVariant& variant, const Trace& trace) {
  const std::vector<double> map_theta = map_estimate(trace);
  std::printf("variant %s: %zu draws, acceptance %.3f, step scale %.4f\n", variant.name.c_str(),
              trace.draws.size(), trace.meta.acceptance_rate, trace.meta.step_scale);
  for (std::size_t j = 0; j < trace.param_names.size(); ++j) {
    const Interval in = hdi(trace.column(trace.param_names[j]), 0.95);
    std::printf("  %-14s map=%9.4f  hdi95=[%9.4f, %9.4f]\n", trace.param_names[j].c_str(),
                map_theta[j], in.lo, in.hi);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"continuous-semantics referring expression model"};
  app.require_subcommand(1);

  SharedArgs shared;
  std::uint64_t seed = 1;

  auto add_shared = [&](CLI::App* cmd, bool with_alternatives = true) {
    cmd->add_option("--gen", shared.gen,
                    "built-in scene set (fig1|sizecolor|koolen|sweep|banana|taxonomy)");
    cmd->add_option("--contexts", shared.contexts_path, "context JSON file");
    cmd->add_option("--typicality", shared.typicality_path, "typicality CSV file");
    cmd->add_option("--costs", shared.costs_path, "frequency/length cost CSV file");
    if (with_alternatives)
      cmd->add_option("--alternatives", shared.alternatives,
                      "alternative enumeration (grid|contextual|taxonomy|attested)");
    cmd->add_option("--seed", seed, "random seed");
  };

  // golden
  CLI::App* cmd_golden = app.add_subcommand("golden", "check stored reference tables");

  // simulate
  double x_size = 0.8, x_color = 0.99, x_type = 1.0, beta_i = 1.0, beta_t = 1.0;
  double cost_size = 0.0, cost_color = 0.0, cost_type = 0.0;
  std::string semantics = "fixed", cost_kind = "none", out_path;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "speaker predictions for a scene set");
  add_shared(cmd_sim);
  cmd_sim->add_option("--x-size", x_size, "size semantic value");
  cmd_sim->add_option("--x-color", x_color, "color semantic value");
  cmd_sim->add_option("--x-type", x_type, "type semantic value");
  cmd_sim->add_option("--beta-i", beta_i, "informativity weight");
  cmd_sim->add_option("--beta-t", beta_t, "semantic concentration");
  cmd_sim->add_option("--semantics", semantics, "boolean|fixed|empirical");
  cmd_sim->add_option("--cost-kind", cost_kind, "none|perslot");
  cmd_sim->add_option("--cost-size", cost_size, "per-utterance cost of a size term");
  cmd_sim->add_option("--cost-color", cost_color, "per-utterance cost of a color term");
  cmd_sim->add_option("--cost-type", cost_type, "per-utterance cost of a type/taxonomy term");
  cmd_sim->add_option("--out", out_path, "output predictions CSV")->required();

  // sweep: redundancy across the semantic-value grid
  double grid_lo = 0.5, grid_hi = 0.999;
  int grid_n = 10;
  double sweep_beta_i = 30.0;
  std::string sweep_out;
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "redundancy across the semantic-value grid");
  cmd_sweep->add_option("--lo", grid_lo, "lowest semantic value");
  cmd_sweep->add_option("--hi", grid_hi, "highest semantic value");
  cmd_sweep->add_option("--n", grid_n, "grid points per axis");
  cmd_sweep->add_option("--beta-i", sweep_beta_i, "informativity weight");
  cmd_sweep->add_option("--out", sweep_out, "output CSV")->required();

  // infer
  std::string variant_name = "exp1", trials_path, trace_out, predictive_out;
  MhOptions mh_opt;
  CLI::App* cmd_infer = app.add_subcommand("infer", "posterior sampling from production trials");
  add_shared(cmd_infer);
  cmd_infer->add_option("--priors", variant_name, "model variant");
  cmd_infer->add_option("--trials", trials_path, "trials CSV")->required();
  cmd_infer->add_option("--burn-in", mh_opt.burn_in, "burn-in iterations");
  cmd_infer->add_option("--lag", mh_opt.lag, "thinning lag");
  cmd_infer->add_option("--samples", mh_opt.samples, "posterior samples to keep");
  cmd_infer->add_option("--out", trace_out, "output trace CSV")->required();
  cmd_infer->add_option("--predictive", predictive_out, "posterior predictive CSV");

  // predict from an existing trace
  std::string trace_in, predict_out;
  CLI::App* cmd_predict = app.add_subcommand("predict", "posterior predictive from a saved trace");
  add_shared(cmd_predict);
  cmd_predict->add_option("--priors", variant_name, "model variant");
  cmd_predict->add_option("--trace", trace_in, "trace CSV")->required();
  cmd_predict->add_option("--out", predict_out, "output predictions CSV")->required();

  // compare
  std::string compare_variants = "exp2", compare_out, bf_out;
  AisConfig ais_cfg;
  CLI::App* cmd_compare = app.add_subcommand("compare", "marginal likelihoods across variants");
  add_shared(cmd_compare);
  cmd_compare->add_option("--variants", compare_variants,
                          "comma list of variants, or exp2 for the full 3x3 family");
  cmd_compare->add_option("--trials", trials_path, "trials CSV")->required();
  cmd_compare->add_option("--chains", ais_cfg.chains, "annealing chains");
  cmd_compare->add_option("--steps", ais_cfg.steps, "annealing ladder steps");
  cmd_compare->add_option("--out", compare_out, "output comparison CSV")->required();
  cmd_compare->add_option("--bf-out", bf_out, "output pairwise Bayes factor matrix CSV");

  // recover
  double true_x_size = 0.79, true_x_color = 0.88, true_bc_size = 0.0, true_bc_color = 0.0,
         true_beta_i = 31.4;
  int n_trials = 2000;
  std::string recover_trace_out, recover_trials_out;
  CLI::App* cmd_recover = app.add_subcommand("recover", "synthesize trials and refit");
  cmd_recover->add_option("--x-size", true_x_size, "true size semantic value");
  cmd_recover->add_option("--x-color", true_x_color, "true color semantic value");
  cmd_recover->add_option("--bc-size", true_bc_size, "true size cost weight");
  cmd_recover->add_option("--bc-color", true_bc_color, "true color cost weight");
  cmd_recover->add_option("--beta-i", true_beta_i, "true informativity weight");
  cmd_recover->add_option("--n-trials", n_trials, "number of synthetic trials");
  cmd_recover->add_option("--seed", seed, "random seed");
  cmd_recover->add_option("--burn-in", mh_opt.burn_in, "burn-in iterations");
  cmd_recover->add_option("--lag", mh_opt.lag, "thinning lag");
  cmd_recover->add_option("--samples", mh_opt.samples, "posterior samples to keep");
  cmd_recover->add_option("--out", recover_trace_out, "output trace CSV");
  cmd_recover->add_option("--trials-out", recover_trials_out, "output synthetic trials CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (cmd_golden->parsed()) {
    const GoldenReport report = check_golden_all();
    std::printf("checked %d reference cells, max deviation %.6f\n", report.n_checked,
                report.max_abs_dev);
    for (const std::string& f : report.failures) std::printf("FAIL %s\n", f.c_str());
    std::printf("%s\n", report.ok() ? "PASS golden tables" : "FAIL golden tables");
    return report.ok() ? 0 : 1;
  }

  if (cmd_sim->parsed()) {
    const std::vector<ReferenceContext> ctxs = load_contexts(shared);
    const std::vector<Condition> conds = build_conditions(shared, ctxs);
    const ModelParams params = build_manual_params(x_size, x_color, x_type, beta_i, beta_t,
                                                   semantics, cost_kind, cost_size, cost_color,
                                                   cost_type, shared);
    write_predictions_csv(out_path, prediction_table(conds, params));
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
  }

  if (cmd_sweep->parsed()) {
    std::ofstream out(sweep_out);
    if (!out) throw std::runtime_error("cannot open " + sweep_out + " for writing");
    out << "x_size,x_color,beta_i,p_redundant,p_sufficient\n";
    char buf[200];
    for (const Sim1Cell& cell : gen_sim1_grid(linspace(grid_lo, grid_hi, grid_n),
                                              linspace(grid_lo, grid_hi, grid_n),
                                              {sweep_beta_i})) {
      const std::vector<Utterance> alts = attested_size_color_alternatives(cell.context);
      const Distribution d = speaker(cell.context, cell.context.target_id, cell.params, alts);
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f\n", cell.x_size, cell.x_color,
                    cell.beta_i, d.prob_of("small blue"), d.prob_of("small"));
      out << buf;
    }
    std::printf("wrote %s\n", sweep_out.c_str());
    return 0;
  }

  if (cmd_infer->parsed()) {
    const ModelVariant variant = build_variant(variant_name, shared);
    const std::vector<Condition> conds =
        build_variant_conditions(shared, load_contexts(shared), variant);
    const TrialLikelihood likelihood(conds, read_trials_csv(trials_path));
    mh_opt.seed = seed;
    const Trace trace = fit(variant, likelihood, mh_opt);
    write_trace_csv(trace_out, trace);
    print_trace_summary(variant, trace);
    const PredictionTable pp = posterior_predictive(variant, trace, likelihood.conditions());
    if (!predictive_out.empty()) write_predictions_csv(predictive_out, pp);
    try {
      std::printf("  r(MAP predictive, empirical) = %.4f\n",
                  correlate(pp, likelihood.empirical_table()));
    } catch (const std::exception&) {
      // fewer than three observed cells: nothing to correlate
    }
    return 0;
  }

  if (cmd_predict->parsed()) {
    const ModelVariant variant = build_variant(variant_name, shared);
    const std::vector<Condition> conds =
        build_variant_conditions(shared, load_contexts(shared), variant);
    const Trace trace = read_trace_csv(trace_in);
    write_predictions_csv(predict_out, posterior_predictive(variant, trace, conds));
    std::printf("wrote %s\n", predict_out.c_str());
    return 0;
  }

  if (cmd_compare->parsed()) {
    std::vector<std::string> names;
    if (compare_variants == "exp2") {
      for (const char* s : {"empirical", "fixed", "interpolated"})
        for (const char* c : {"none", "fixed", "empirical"})
          names.push_back(std::string("exp2-") + s + "-" + c);
    } else {
      std::stringstream ss(compare_variants);
      std::string item;
      while (std::getline(ss, item, ',')) names.push_back(item);
    }
    const std::vector<Trial> trials = read_trials_csv(trials_path);
    std::vector<ComparisonRow> rows;
    for (const std::string& name : names) {
      const ModelVariant variant = build_variant(name, shared);
      const std::vector<Condition> conds =
          build_variant_conditions(shared, load_contexts(shared), variant);
      const TrialLikelihood likelihood(conds, trials);
      ais_cfg.seed = seed;
      const AisResult res = ais_log_marginal(variant, likelihood, ais_cfg);
      rows.push_back({variant.name, res.log_marginal, res.se});
      std::printf("%-32s logZ=%12.4f se=%.4f\n", variant.name.c_str(), res.log_marginal, res.se);
    }
    write_comparison_csv(compare_out, rows);
    if (!bf_out.empty()) write_bf_matrix_csv(bf_out, rows);
    return 0;
  }

  if (cmd_recover->parsed()) {
    const ModelVariant variant = make_exp1_variant(true);
    const std::vector<Condition> conds = gen_variation_sweep();
    const std::vector<double> truth = {true_x_size, true_x_color, true_bc_size, true_bc_color,
                                       true_beta_i};
    const std::vector<Trial> trials =
        synthesize_trials(conds, variant.params_at(truth), n_trials, splitmix64(seed));
    if (!recover_trials_out.empty()) write_trials_csv(recover_trials_out, trials);
    const TrialLikelihood likelihood(conds, trials);
    mh_opt.seed = seed;
    const Trace trace = fit(variant, likelihood, mh_opt);
    if (!recover_trace_out.empty()) write_trace_csv(recover_trace_out, trace);
    print_trace_summary(variant, trace);
    bool all_contained = true;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const Interval in = hdi(trace.column(trace.param_names[j]), 0.95);
      const bool contained = in.contains(truth[j], 0.005);
      all_contained &= contained;
      std::printf("  %-14s truth=%8.4f %s\n", trace.param_names[j].c_str(), truth[j],
                  contained ? "contained" : "NOT CONTAINED");
    }
    return all_contained ? 0 : 1;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
