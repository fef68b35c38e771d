#include <cmath>
#include <string>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "csrsa/generators.hpp"
#include "csrsa/golden.hpp"
#include "csrsa/inference.hpp"

using namespace csrsa;

namespace {

std::vector<Condition> fig1_conditions() {
  const ReferenceContext ctx = gen_fig1_context(Slot::Size);
  return {{ctx, attested_size_color_alternatives(ctx)}};
}

MhOptions quick_mh(std::uint64_t seed) {
  MhOptions opt;
  opt.burn_in = 500;
  opt.lag = 2;
  opt.samples = 200;
  opt.init_draws = 50;
  opt.seed = seed;
  return opt;
}

}  // namespace

TEST_CASE("hdi covers the requested mass", "[inference]") {
  Rng rng(7);
  std::vector<double> uniform(10000);
  for (double& v : uniform) v = rng.uniform();
  const Interval in = hdi(uniform, 0.95);
  CHECK(in.hi - in.lo == Catch::Approx(0.95).margin(0.02));

  const Interval point = hdi(std::vector<double>(50, 3.14), 0.95);
  CHECK(point.lo == point.hi);

  const Interval tie = hdi({0.0, 1.0, 2.0, 3.0}, 0.5);
  CHECK(tie.lo == 0.0);
  CHECK(tie.hi == 1.0);

  CHECK(Interval{0.2, 0.4}.contains(0.2));
  CHECK(Interval{0.2, 0.4}.contains(0.403, 0.005));
  CHECK_FALSE(Interval{0.2, 0.4}.contains(0.41, 0.005));
  CHECK_THROWS_AS(hdi({}, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(hdi({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("map estimate takes the earliest top draw", "[inference]") {
  Trace trace;
  trace.param_names = {"x"};
  trace.draws = {{0.1}, {0.2}, {0.3}};
  trace.log_post = {-5.0, -1.0, -1.0};
  CHECK(map_estimate(trace) == std::vector<double>{0.2});
  CHECK(trace.column("x") == std::vector<double>{0.1, 0.2, 0.3});
  CHECK_THROWS_AS(trace.column("y"), std::invalid_argument);
}

TEST_CASE("trial likelihood matches direct speaker evaluation", "[inference]") {
  const std::vector<Condition> conds = fig1_conditions();
  const ModelParams params = golden_continuous_params(30.0);
  const Distribution d =
      speaker(conds[0].context, "small_blue", params, conds[0].alternatives);

  const TrialLikelihood one(conds, {{"fig1_size", "small blue"}});
  CHECK(one(params) == Catch::Approx(std::log(d.prob_of("small blue"))));

  const TrialLikelihood two(conds, {{"fig1_size", "small blue"}, {"fig1_size", "small"}});
  CHECK(two(params) ==
        Catch::Approx(std::log(d.prob_of("small blue")) + std::log(d.prob_of("small"))));

  const TrialLikelihood counted(conds, {{"fig1_size", "small blue", 2}});
  CHECK(counted(params) == Catch::Approx(2.0 * std::log(d.prob_of("small blue"))));
  CHECK(counted.n_trials() == 2);

  const TrialLikelihood empty(conds, {});
  CHECK(empty(params) == 0.0);
  CHECK(empty(golden_boolean_params(1.0)) == 0.0);

  const TrialLikelihood impossible(conds, {{"fig1_size", "big"}});
  CHECK(impossible(golden_boolean_params(1.0)) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("trial likelihood validates its inputs", "[inference]") {
  const std::vector<Condition> conds = fig1_conditions();
  CHECK_THROWS_AS(TrialLikelihood(conds, {{"nowhere", "small"}}), std::invalid_argument);
  CHECK_THROWS_AS(TrialLikelihood(conds, {{"fig1_size", "small green"}}), std::invalid_argument);
  CHECK_THROWS_AS(TrialLikelihood(conds, {{"fig1_size", "small", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(TrialLikelihood({}, {}), std::invalid_argument);
  std::vector<Condition> dup = {conds[0], conds[0]};
  CHECK_THROWS_AS(TrialLikelihood(dup, {}), std::invalid_argument);
}

TEST_CASE("empirical table reports observed proportions", "[inference]") {
  const std::vector<Condition> conds = fig1_conditions();
  const TrialLikelihood lik(conds, {{"fig1_size", "small blue", 3}, {"fig1_size", "small", 1}});
  const PredictionTable t = lik.empirical_table();
  REQUIRE(t.rows.size() == conds[0].alternatives.size());
  for (const PredictionRow& r : t.rows) {
    if (r.utterance == "small blue") CHECK(r.probability == Catch::Approx(0.75));
    else if (r.utterance == "small") CHECK(r.probability == Catch::Approx(0.25));
    else CHECK(r.probability == 0.0);
  }
}

TEST_CASE("mh sampling is seed deterministic", "[inference]") {
  PriorSpec prior;
  prior.params = {{"a", 0.0, 1.0}, {"b", 0.0, 2.0}};
  auto loglik = [](std::span<const double> t) { return -t[0] * t[0] - t[1]; };
  const Trace t1 = mh_sample(prior, loglik, quick_mh(11));
  const Trace t2 = mh_sample(prior, loglik, quick_mh(11));
  const Trace t3 = mh_sample(prior, loglik, quick_mh(12));
  REQUIRE(t1.draws.size() == 200);
  CHECK(t1.draws == t2.draws);
  CHECK(t1.log_post == t2.log_post);
  CHECK(t1.draws != t3.draws);
  for (const auto& row : t1.draws) {
    CHECK(row[0] >= 0.0);
    CHECK(row[0] <= 1.0);
    CHECK(row[1] >= 0.0);
    CHECK(row[1] <= 2.0);
  }
  CHECK(t1.meta.seed == 11);
  CHECK(t1.meta.acceptance_rate > 0.0);
  CHECK(t1.meta.acceptance_rate < 1.0);
}

TEST_CASE("flat-likelihood posterior matches the prior", "[inference]") {
  PriorSpec prior;
  prior.params = {{"x_size", 0.0, 1.0}, {"x_color", 0.0, 1.0}, {"beta_i", 0.0, 40.0}};
  auto flat = [](std::span<const double>) { return 0.0; };
  MhOptions opt;
  opt.seed = 3;
  const Trace trace = mh_sample(prior, flat, opt);
  REQUIRE(trace.draws.size() == 2000);
  for (const ParamBounds& b : prior.params) {
    const double ks = ks_uniform(trace.column(b.name), b.lo, b.hi);
    INFO("parameter " << b.name << " ks " << ks);
    CHECK(ks < 0.05);
  }
}

TEST_CASE("posterior predictive plugs in the map draw", "[inference]") {
  const std::vector<Condition> conds = fig1_conditions();
  Trace trace;
  trace.param_names = {"beta_i"};
  trace.draws = {{1.0}, {30.0}, {2.0}};
  trace.log_post = {-10.0, -1.0, -4.0};
  auto bind = [](std::span<const double> t) { return golden_continuous_params(t[0]); };
  const PredictionTable got = posterior_predictive(trace, conds, bind);
  const PredictionTable want = prediction_table(conds, golden_continuous_params(30.0));
  REQUIRE(got.rows.size() == want.rows.size());
  for (std::size_t i = 0; i < got.rows.size(); ++i)
    CHECK(got.rows[i].probability == Catch::Approx(want.rows[i].probability));
}

TEST_CASE("correlate matches tables by key", "[inference]") {
  PredictionTable a;
  a.rows = {{"c", "u1", 0.1, "size"}, {"c", "u2", 0.4, "size"}, {"c", "u3", 0.5, "size"}};
  PredictionTable shuffled;
  shuffled.rows = {{"c", "u3", 0.5, "size"}, {"c", "u1", 0.1, "size"}, {"c", "u2", 0.4, "size"}};
  CHECK(correlate(a, shuffled) == Catch::Approx(1.0));

  PredictionTable reversed;
  reversed.rows = {{"c", "u1", 0.5, "size"}, {"c", "u2", 0.4, "size"}, {"c", "u3", 0.1, "size"}};
  CHECK(correlate(a, reversed) < 0.0);

  PredictionTable anti;  // probability = 1 - a's, a perfect negative linear map
  anti.rows = {{"c", "u1", 0.9, "size"}, {"c", "u2", 0.6, "size"}, {"c", "u3", 0.5, "size"}};
  CHECK(correlate(a, anti) == Catch::Approx(-1.0));

  PredictionTable missing;
  missing.rows = {{"c", "u1", 0.5, "size"}, {"c", "u2", 0.4, "size"}, {"c", "u9", 0.1, "size"}};
  CHECK_THROWS_AS(correlate(a, missing), std::invalid_argument);

  PredictionTable small;
  small.rows = {{"c", "u1", 0.1, "size"}, {"c", "u2", 0.4, "size"}};
  CHECK_THROWS_AS(correlate(small, small), std::invalid_argument);
  CHECK_THROWS_AS(correlate(a, small), std::invalid_argument);

  PredictionTable dup;
  dup.rows = {{"c", "u1", 0.1, "size"}, {"c", "u1", 0.4, "size"}, {"c", "u3", 0.5, "size"}};
  CHECK_THROWS_AS(correlate(a, dup), std::invalid_argument);
}

TEST_CASE("synthetic trials spread evenly and follow the speaker", "[inference]") {
  const std::vector<Condition> conds = gen_banana_conditions();
  const std::vector<Trial> trials = synthesize_trials(conds, gen_banana_params(), 10, 42);
  REQUIRE(trials.size() == 10);
  std::map<std::string, int> per_context;
  for (const Trial& t : trials) per_context[t.context_id] += t.count;
  CHECK(per_context["yellow_banana_scene"] == 4);
  CHECK(per_context["brown_banana_scene"] == 3);
  CHECK(per_context["blue_banana_scene"] == 3);

  const std::vector<Trial> again = synthesize_trials(conds, gen_banana_params(), 10, 42);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    CHECK(trials[i].context_id == again[i].context_id);
    CHECK(trials[i].coded_utterance == again[i].coded_utterance);
  }
  CHECK_THROWS_AS(synthesize_trials({}, gen_banana_params(), 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_trials(conds, gen_banana_params(), 0, 1), std::invalid_argument);
}
