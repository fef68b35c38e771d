#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csrsa/scene.hpp"

namespace csrsa {

/// Graded truth values for the parametrized fixed semantics: a term true of
/// an object scores x on its slot, a false term scores 1-x.
struct FixedSemanticParams {
  double x_size = 1.0;
  double x_color = 1.0;
  double x_type = 1.0;

  double x_for(Slot s) const {
    switch (s) {
      case Slot::Size: return x_size;
      case Slot::Color: return x_color;
      default: return x_type;
    }
  }

  void validate() const {
    for (double x : {x_size, x_color, x_type})
      if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("fixed semantic values must lie in [0,1]");
  }
};

struct TypicalityRow {
  std::string utterance;
  std::string object;
  double value = 0.0;
};

/// Empirically normed utterance-object typicalities. Lookups are keyed by a
/// normalized (lowercased, word-order-insensitive) utterance string and the
/// normalized object id; unseen pairs score 0.
class TypicalityTable {
 public:
  static std::string normalize_utterance_key(const std::string& text) {
    std::vector<std::string> words;
    std::string w;
    for (char c : text + " ") {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!w.empty()) words.push_back(w);
        w.clear();
      } else {
        w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    std::sort(words.begin(), words.end());
    std::string key;
    for (const std::string& word : words) {
      if (!key.empty()) key += ' ';
      key += word;
    }
    return key;
  }

  static std::string normalize_object_key(const std::string& id) {
    std::string key;
    for (char c : id)
      if (!std::isspace(static_cast<unsigned char>(c)))
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return key;
  }

  double value(const std::string& utterance_text, const std::string& object_id) const {
    auto it = entries_.find({normalize_utterance_key(utterance_text), normalize_object_key(object_id)});
    return it == entries_.end() ? 0.0 : it->second;
  }

  void set(const std::string& utterance_text, const std::string& object_id, double v) {
    entries_[{normalize_utterance_key(utterance_text), normalize_object_key(object_id)}] = v;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, double> entries_;
};

/// Builds a table from raw rows. Values must lie in [0,1]; rows that collapse
/// onto the same normalized key are averaged.
inline TypicalityTable load_typicality_table(const std::vector<TypicalityRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> acc;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TypicalityRow& r = rows[i];
    if (!(r.value >= 0.0 && r.value <= 1.0)) {
      std::ostringstream msg;
      msg << "typicality out of [0,1] at row " << i + 1 << " (" << r.utterance << ", " << r.object
          << "): " << r.value;
      throw std::invalid_argument(msg.str());
    }
    auto key = std::make_pair(TypicalityTable::normalize_utterance_key(r.utterance),
                              TypicalityTable::normalize_object_key(r.object));
    auto& slot = acc[key];
    slot.first += r.value;
    slot.second += 1;
  }
  TypicalityTable table;
  for (const auto& [key, sum_count] : acc)
    table.set(key.first, key.second, sum_count.first / sum_count.second);
  return table;
}

enum class LexiconSource { Boolean, Fixed, Empirical, Interpolated };

/// Which semantics grounds the literal listener, plus its ingredients.
/// Interpolated mixes the fixed and empirical values with weight beta_fixed
/// on the fixed side.
struct LexiconSpec {
  LexiconSource source = LexiconSource::Boolean;
  std::optional<FixedSemanticParams> fixed;
  std::shared_ptr<const TypicalityTable> table;
  double beta_fixed = 1.0;

  bool is_boolean() const { return source == LexiconSource::Boolean; }

  void validate() const {
    const bool needs_fixed =
        source == LexiconSource::Fixed || source == LexiconSource::Interpolated;
    const bool needs_table =
        source == LexiconSource::Empirical || source == LexiconSource::Interpolated;
    if (needs_fixed) {
      if (!fixed) throw std::invalid_argument("lexicon source needs fixed semantic params");
      fixed->validate();
    }
    if (needs_table && !table)
      throw std::invalid_argument("lexicon source needs a typicality table");
    if (source == LexiconSource::Interpolated && !(beta_fixed >= 0.0 && beta_fixed <= 1.0))
      throw std::invalid_argument("beta_fixed must lie in [0,1]");
  }
};

inline double compose_product(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
    throw std::invalid_argument("semantic values must lie in [0,1]");
  return a * b;
}

inline double interpolate(double fixed_value, double empirical_value, double beta_fixed) {
  if (!(beta_fixed >= 0.0 && beta_fixed <= 1.0))
    throw std::invalid_argument("beta_fixed must lie in [0,1]");
  return beta_fixed * fixed_value + (1.0 - beta_fixed) * empirical_value;
}

namespace detail {

inline bool term_true_of(const Term& t, const SceneObject& o) {
  const auto v = o.features.value(t.slot);
  return v && *v == t.label;
}

inline double boolean_value(const Utterance& u, const SceneObject& o) {
  for (const Term& t : u.terms())
    if (!term_true_of(t, o)) return 0.0;
  return 1.0;
}

inline double fixed_value(const FixedSemanticParams& xs, const Utterance& u,
                          const SceneObject& o) {
  double v = 1.0;
  for (const Term& t : u.terms()) {
    const double x = xs.x_for(t.slot);
    v = compose_product(v, term_true_of(t, o) ? x : 1.0 - x);
  }
  return v;
}

}  // namespace detail

/// Degree (in [0,1]) to which `u` applies to `o` under the given lexicon.
/// Multi-term utterances compose by product for the boolean and fixed
/// sources; empirical values are whole-utterance lookups.
inline double semantic_value(const LexiconSpec& lex, const Utterance& u, const SceneObject& o) {
  lex.validate();
  switch (lex.source) {
    case LexiconSource::Boolean:
      return detail::boolean_value(u, o);
    case LexiconSource::Fixed:
      return detail::fixed_value(*lex.fixed, u, o);
    case LexiconSource::Empirical:
      return lex.table->value(u.text(), o.id);
    case LexiconSource::Interpolated:
      return interpolate(detail::fixed_value(*lex.fixed, u, o), lex.table->value(u.text(), o.id),
                         lex.beta_fixed);
  }
  throw std::logic_error("unreachable lexicon source");
}

}  // namespace csrsa
