#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "csrsa/engine.hpp"
#include "csrsa/generators.hpp"

namespace csrsa {

/// Reference probabilities for the three-object size/color scene, columns
/// ordered (big_blue, big_red, small_blue). Continuous cells are quoted to
/// two decimals and checked at +/-0.005; boolean cells are exact.
struct GoldenRow {
  const char* utterance;
  double p[3];
};

inline const std::vector<GoldenRow>& golden_literal_continuous() {
  static const std::vector<GoldenRow> rows = {
      {"big", {0.39, 0.39, 0.22}},      {"small", {0.26, 0.26, 0.48}},
      {"blue", {0.42, 0.16, 0.42}},     {"red", {0.21, 0.57, 0.21}},
      {"big blue", {0.50, 0.23, 0.27}}, {"big red", {0.24, 0.52, 0.24}},
      {"small blue", {0.28, 0.23, 0.50}}};
  return rows;
}

inline const std::vector<GoldenRow>& golden_literal_boolean() {
  static const std::vector<GoldenRow> rows = {
      {"big", {0.5, 0.5, 0.0}},      {"small", {0.0, 0.0, 1.0}},
      {"blue", {0.5, 0.0, 0.5}},     {"red", {0.0, 1.0, 0.0}},
      {"big blue", {1.0, 0.0, 0.0}}, {"big red", {0.0, 1.0, 0.0}},
      {"small blue", {0.0, 0.0, 1.0}}};
  return rows;
}

inline const std::vector<GoldenRow>& golden_speaker_beta1() {
  static const std::vector<GoldenRow> rows = {
      {"big", {0.17, 0.17, 0.09}},      {"small", {0.11, 0.11, 0.20}},
      {"blue", {0.18, 0.07, 0.18}},     {"red", {0.09, 0.24, 0.09}},
      {"big blue", {0.22, 0.10, 0.12}}, {"big red", {0.10, 0.22, 0.10}},
      {"small blue", {0.12, 0.10, 0.21}}};
  return rows;
}

inline const std::vector<GoldenRow>& golden_speaker_beta30() {
  static const std::vector<GoldenRow> rows = {
      {"big", {0.00, 0.00, 0.00}},      {"small", {0.00, 0.00, 0.21}},
      {"blue", {0.01, 0.00, 0.00}},     {"red", {0.00, 0.93, 0.00}},
      {"big blue", {0.99, 0.00, 0.00}}, {"big red", {0.00, 0.07, 0.00}},
      {"small blue", {0.00, 0.00, 0.79}}};
  return rows;
}

inline const std::vector<GoldenRow>& golden_speaker_boolean_beta1() {
  static const std::vector<GoldenRow> rows = {
      {"big", {0.25, 0.20, 0.00}},      {"small", {0.00, 0.00, 0.40}},
      {"blue", {0.25, 0.00, 0.20}},     {"red", {0.00, 0.40, 0.00}},
      {"big blue", {0.50, 0.00, 0.00}}, {"big red", {0.00, 0.40, 0.00}},
      {"small blue", {0.00, 0.00, 0.40}}};
  return rows;
}

/// Pragmatic listener over objects (big_blue, big_red, small_blue) on
/// hearing "small blue" at beta_i = 30, uniform prior.
inline const std::vector<double>& golden_pragmatic_small_blue() {
  static const std::vector<double> p = {2.39082118e-08, 1.01377702e-12, 9.99999976e-01};
  return p;
}

struct GoldenReport {
  int n_checked = 0;
  double max_abs_dev = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }

  void record(const std::string& label, double got, double want, double tol) {
    ++n_checked;
    const double dev = std::abs(got - want);
    max_abs_dev = std::max(max_abs_dev, dev);
    if (dev > tol) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: got %.6f want %.6f (tol %.4f)", label.c_str(), got, want,
                    tol);
      failures.push_back(buf);
    }
  }

  void merge(const GoldenReport& other) {
    n_checked += other.n_checked;
    max_abs_dev = std::max(max_abs_dev, other.max_abs_dev);
    failures.insert(failures.end(), other.failures.begin(), other.failures.end());
  }
};

inline ModelParams golden_continuous_params(double beta_i) {
  ModelParams p;
  p.lexicon.source = LexiconSource::Fixed;
  p.lexicon.fixed = FixedSemanticParams{0.8, 0.99, 1.0};
  p.beta_i = beta_i;
  p.beta_t = 1.0;
  return p;
}

inline ModelParams golden_boolean_params(double beta_i) {
  ModelParams p;
  p.lexicon.source = LexiconSource::Boolean;
  p.beta_i = beta_i;
  return p;
}

inline const std::vector<std::string>& golden_object_order() {
  static const std::vector<std::string> ids = {"big_blue", "big_red", "small_blue"};
  return ids;
}

inline GoldenReport check_golden_literal(const ModelParams& params,
                                         const std::vector<GoldenRow>& rows, double tol,
                                         const std::string& tag) {
  GoldenReport report;
  const ReferenceContext ctx = gen_sizecolor_context("small_blue");
  const std::vector<Utterance> alts = attested_size_color_alternatives(ctx);
  for (const GoldenRow& row : rows) {
    const Utterance* u = nullptr;
    for (const Utterance& a : alts)
      if (a.text() == row.utterance) u = &a;
    if (!u) {
      report.failures.push_back(tag + ": missing alternative " + row.utterance);
      continue;
    }
    const Distribution d = literal_listener(ctx, *u, params);
    for (std::size_t j = 0; j < golden_object_order().size(); ++j)
      report.record(tag + " L0(" + golden_object_order()[j] + " | " + row.utterance + ")",
                    d.prob_of(golden_object_order()[j]), row.p[j], tol);
  }
  return report;
}

inline GoldenReport check_golden_speaker(const ModelParams& params,
                                         const std::vector<GoldenRow>& rows, double tol,
                                         const std::string& tag) {
  GoldenReport report;
  for (std::size_t j = 0; j < golden_object_order().size(); ++j) {
    const std::string& target = golden_object_order()[j];
    const ReferenceContext ctx = gen_sizecolor_context(target);
    const std::vector<Utterance> alts = attested_size_color_alternatives(ctx);
    const Distribution d = speaker(ctx, target, params, alts);
    for (const GoldenRow& row : rows)
      report.record(tag + " S(" + row.utterance + " | " + target + ")", d.prob_of(row.utterance),
                    row.p[j], tol);
  }
  return report;
}

inline GoldenReport check_golden_pragmatic() {
  GoldenReport report;
  const ReferenceContext ctx = gen_sizecolor_context("small_blue");
  const std::vector<Utterance> alts = attested_size_color_alternatives(ctx);
  Utterance u({Term{Slot::Size, "small"}, Term{Slot::Color, "blue"}});
  const Distribution d = pragmatic_listener(ctx, u, golden_continuous_params(30.0), alts);
  const std::vector<double>& want = golden_pragmatic_small_blue();
  for (std::size_t j = 0; j < golden_object_order().size(); ++j) {
    const double got = d.prob_of(golden_object_order()[j]);
    const double tol = std::max(1e-12, 1e-5 * want[j]);
    report.record("L1(" + golden_object_order()[j] + " | small blue)", got, want[j], tol);
  }
  return report;
}

/// Every stored reference table checked at its quoted tolerance.
inline GoldenReport check_golden_all() {
  GoldenReport report;
  report.merge(check_golden_literal(golden_continuous_params(1.0), golden_literal_continuous(),
                                    0.005, "continuous"));
  report.merge(
      check_golden_literal(golden_boolean_params(1.0), golden_literal_boolean(), 1e-12, "boolean"));
  report.merge(
      check_golden_speaker(golden_continuous_params(1.0), golden_speaker_beta1(), 0.005, "beta1"));
  report.merge(
      check_golden_speaker(golden_continuous_params(30.0), golden_speaker_beta30(), 0.005, "beta30"));
  report.merge(check_golden_speaker(golden_boolean_params(1.0), golden_speaker_boolean_beta1(),
                                    1e-12, "boolean-beta1"));
  report.merge(check_golden_pragmatic());
  return report;
}

}  // namespace csrsa
