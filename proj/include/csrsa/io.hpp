#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "csrsa/inference.hpp"
#include "csrsa/model_compare.hpp"
#include "csrsa/semantics.hpp"

namespace csrsa {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": cannot parse number '" + s + "'");
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

/// Header lookup: returns column index or throws naming the file.
inline std::size_t column_of(const std::vector<std::string>& header, const std::string& name,
                             const std::string& path) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::runtime_error(path + ": missing required column '" + name + "'");
}

}  // namespace detail

/// Context JSON layout:
/// {"contexts": [{"id": ..., "target": ..., "objects": [{"id": ...,
///   "type": ..., "size"?, "color"?, "sub"?, "basic"?, "super"?,
///   "prior"?}, ...]}, ...]}
inline std::vector<ReferenceContext> read_contexts_json(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": invalid json: " + e.what());
  }
  if (!doc.contains("contexts") || !doc["contexts"].is_array())
    throw std::runtime_error(path + ": expected a top-level 'contexts' array");
  std::vector<ReferenceContext> out;
  for (std::size_t ci = 0; ci < doc["contexts"].size(); ++ci) {
    const auto& jc = doc["contexts"][ci];
    const std::string where = path + ": contexts[" + std::to_string(ci) + "]";
    try {
      if (!jc.contains("objects") || !jc["objects"].is_array())
        throw std::invalid_argument("missing 'objects' array");
      std::vector<SceneObject> objects;
      std::map<std::string, double> prior;
      bool any_prior = false;
      for (const auto& jo : jc["objects"]) {
        SceneObject o;
        o.id = jo.value("id", "");
        o.features.type = jo.value("type", "");
        if (jo.contains("size")) o.features.size = jo["size"].get<std::string>();
        if (jo.contains("color")) o.features.color = jo["color"].get<std::string>();
        if (jo.contains("sub") || jo.contains("basic") || jo.contains("super")) {
          Taxonomy tax;
          tax.sub = jo.value("sub", "");
          tax.basic = jo.value("basic", "");
          tax.super = jo.value("super", "");
          o.features.taxonomy = tax;
        }
        if (jo.contains("prior")) {
          prior[o.id] = jo["prior"].get<double>();
          any_prior = true;
        }
        objects.push_back(std::move(o));
      }
      out.push_back(make_context(objects, jc.value("target", ""),
                                 any_prior ? prior : std::map<std::string, double>{},
                                 jc.value("id", "ctx" + std::to_string(ci))));
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  if (out.empty()) throw std::runtime_error(path + ": no contexts found");
  return out;
}

inline void write_contexts_json(const std::string& path, const std::vector<ReferenceContext>& ctxs) {
  nlohmann::json doc;
  doc["contexts"] = nlohmann::json::array();
  for (const ReferenceContext& ctx : ctxs) {
    nlohmann::json jc;
    jc["id"] = ctx.id;
    jc["target"] = ctx.target_id;
    jc["objects"] = nlohmann::json::array();
    for (std::size_t i = 0; i < ctx.objects.size(); ++i) {
      const SceneObject& o = ctx.objects[i];
      nlohmann::json jo;
      jo["id"] = o.id;
      jo["type"] = o.features.type;
      if (o.features.size) jo["size"] = *o.features.size;
      if (o.features.color) jo["color"] = *o.features.color;
      if (o.features.taxonomy) {
        jo["sub"] = o.features.taxonomy->sub;
        jo["basic"] = o.features.taxonomy->basic;
        jo["super"] = o.features.taxonomy->super;
      }
      jo["prior"] = ctx.prior_of(o.id);
      jc["objects"].push_back(jo);
    }
    doc["contexts"].push_back(jc);
  }
  std::ofstream out = detail::open_output(path);
  out << doc.dump(2) << "\n";
}

/// Trials CSV: header "context_id,coded_utterance,count"; the count column
/// is optional on input and defaults to 1.
inline std::vector<Trial> read_trials_csv(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const std::vector<std::string> header = detail::split_csv_line(line);
  const std::size_t ic = detail::column_of(header, "context_id", path);
  const std::size_t iu = detail::column_of(header, "coded_utterance", path);
  int in_count = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "count") in_count = static_cast<int>(i);
  std::vector<Trial> trials;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> f = detail::split_csv_line(line);
    const std::string where = path + ":" + std::to_string(row);
    if (f.size() <= std::max(ic, iu)) throw std::runtime_error(where + ": too few fields");
    if (f[ic].empty() || f[iu].empty())
      throw std::runtime_error(where + ": empty context or utterance");
    int count = 1;
    if (in_count >= 0 && static_cast<std::size_t>(in_count) < f.size() &&
        !f[static_cast<std::size_t>(in_count)].empty()) {
      const double c = detail::parse_double(f[static_cast<std::size_t>(in_count)], where);
      count = static_cast<int>(c);
      if (count < 1 || static_cast<double>(count) != c)
        throw std::runtime_error(where + ": count must be a positive integer");
    }
    trials.push_back({f[ic], f[iu], count});
  }
  if (trials.empty()) throw std::runtime_error(path + ": no trials found");
  return trials;
}

inline void write_trials_csv(const std::string& path, const std::vector<Trial>& trials) {
  std::ofstream out = detail::open_output(path);
  out << "context_id,coded_utterance,count\n";
  for (const Trial& t : trials)
    out << t.context_id << "," << t.coded_utterance << "," << t.count << "\n";
}

/// Typicality CSV: header "utterance,object,value" with values in [0,1].
inline TypicalityTable read_typicality_csv(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const std::vector<std::string> header = detail::split_csv_line(line);
  const std::size_t iu = detail::column_of(header, "utterance", path);
  const std::size_t io = detail::column_of(header, "object", path);
  const std::size_t iv = detail::column_of(header, "value", path);
  std::vector<TypicalityRow> rows;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> f = detail::split_csv_line(line);
    const std::string where = path + ":" + std::to_string(row);
    if (f.size() <= std::max({iu, io, iv})) throw std::runtime_error(where + ": too few fields");
    rows.push_back({f[iu], f[io], detail::parse_double(f[iv], where)});
  }
  try {
    return load_typicality_table(rows);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

struct CostTables {
  std::shared_ptr<const std::map<std::string, double>> frequency;
  std::shared_ptr<const std::map<std::string, double>> length;
};

/// Cost CSV: header "utterance,frequency,length", both predictors already
/// scaled to [0,1].
inline CostTables read_costs_csv(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const std::vector<std::string> header = detail::split_csv_line(line);
  const std::size_t iu = detail::column_of(header, "utterance", path);
  const std::size_t ifq = detail::column_of(header, "frequency", path);
  const std::size_t il = detail::column_of(header, "length", path);
  auto freq = std::make_shared<std::map<std::string, double>>();
  auto len = std::make_shared<std::map<std::string, double>>();
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> f = detail::split_csv_line(line);
    const std::string where = path + ":" + std::to_string(row);
    if (f.size() <= std::max({iu, ifq, il})) throw std::runtime_error(where + ": too few fields");
    const std::string key = TypicalityTable::normalize_utterance_key(f[iu]);
    const double fv = detail::parse_double(f[ifq], where);
    const double lv = detail::parse_double(f[il], where);
    if (fv < 0.0 || fv > 1.0 || lv < 0.0 || lv > 1.0)
      throw std::runtime_error(where + ": cost predictors must lie in [0,1]");
    (*freq)[key] = fv;
    (*len)[key] = lv;
  }
  if (freq->empty()) throw std::runtime_error(path + ": no cost rows found");
  CostTables tables;
  tables.frequency = freq;
  tables.length = len;
  return tables;
}

/// Predictions CSV: header "context_id,utterance,probability,aggregate_class",
/// probabilities printed with six decimals.
inline void write_predictions_csv(const std::string& path, const PredictionTable& table) {
  std::ofstream out = detail::open_output(path);
  out << "context_id,utterance,probability,aggregate_class\n";
  for (const PredictionRow& r : table.rows)
    out << r.context_id << "," << r.utterance << "," << detail::fmt("%.6f", r.probability) << ","
        << r.aggregate_class << "\n";
}

inline PredictionTable read_predictions_csv(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const std::vector<std::string> header = detail::split_csv_line(line);
  const std::size_t ic = detail::column_of(header, "context_id", path);
  const std::size_t iu = detail::column_of(header, "utterance", path);
  const std::size_t ip = detail::column_of(header, "probability", path);
  const std::size_t ia = detail::column_of(header, "aggregate_class", path);
  PredictionTable table;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> f = detail::split_csv_line(line);
    const std::string where = path + ":" + std::to_string(row);
    if (f.size() <= std::max({ic, iu, ip, ia})) throw std::runtime_error(where + ": too few fields");
    table.rows.push_back({f[ic], f[iu], detail::parse_double(f[ip], where), f[ia]});
  }
  if (table.rows.empty()) throw std::runtime_error(path + ": no prediction rows found");
  return table;
}

/// Trace CSV: one column per parameter plus log_post; parameters printed
/// with nine significant digits.
inline void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out = detail::open_output(path);
  for (const std::string& name : trace.param_names) out << name << ",";
  out << "log_post\n";
  for (std::size_t i = 0; i < trace.draws.size(); ++i) {
    for (double v : trace.draws[i]) out << detail::fmt("%.9g", v) << ",";
    out << detail::fmt("%.9g", trace.log_post[i]) << "\n";
  }
}

inline Trace read_trace_csv(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::vector<std::string> header = detail::split_csv_line(line);
  if (header.size() < 2 || header.back() != "log_post")
    throw std::runtime_error(path + ": trace header must end in log_post");
  Trace trace;
  trace.param_names.assign(header.begin(), header.end() - 1);
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> f = detail::split_csv_line(line);
    const std::string where = path + ":" + std::to_string(row);
    if (f.size() != header.size()) throw std::runtime_error(where + ": wrong field count");
    std::vector<double> draw;
    for (std::size_t j = 0; j + 1 < f.size(); ++j) draw.push_back(detail::parse_double(f[j], where));
    trace.draws.push_back(std::move(draw));
    trace.log_post.push_back(detail::parse_double(f.back(), where));
  }
  if (trace.draws.empty()) throw std::runtime_error(path + ": no draws found");
  return trace;
}

struct ComparisonRow {
  std::string name;
  double log_marginal = 0.0;
  double se = 0.0;
};

/// Comparison CSV: per model, the log marginal likelihood and the standard
/// error of the estimate across chains.
inline void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("no comparison rows to write");
  std::ofstream out = detail::open_output(path);
  out << "model,log_marginal,se_across_chains\n";
  for (const ComparisonRow& r : rows)
    out << r.name << "," << detail::fmt("%.6f", r.log_marginal) << "," << detail::fmt("%.6f", r.se)
        << "\n";
}

/// Bayes factor matrix CSV: cell (i,j) holds log10 BF of model i over model j.
inline void write_bf_matrix_csv(const std::string& path, const std::vector<ComparisonRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("no comparison rows to write");
  std::ofstream out = detail::open_output(path);
  out << "model";
  for (const ComparisonRow& r : rows) out << "," << r.name;
  out << "\n";
  for (const ComparisonRow& a : rows) {
    out << a.name;
    for (const ComparisonRow& b : rows)
      out << "," << detail::fmt("%.6f", bayes_factor(a.log_marginal, b.log_marginal).log10_bf);
    out << "\n";
  }
}

}  // namespace csrsa
