#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace csrsa {

/// Feature dimensions an utterance term or an object attribute can live on.
/// Sub/Basic/Super are taxonomic levels of reference (dalmatian/dog/animal).
enum class Slot { Size, Color, Type, Sub, Basic, Super };

inline const char* to_string(Slot s) {
  switch (s) {
    case Slot::Size: return "size";
    case Slot::Color: return "color";
    case Slot::Type: return "type";
    case Slot::Sub: return "sub";
    case Slot::Basic: return "basic";
    case Slot::Super: return "super";
  }
  return "?";
}

inline Slot slot_from_string(const std::string& s) {
  if (s == "size") return Slot::Size;
  if (s == "color") return Slot::Color;
  if (s == "type") return Slot::Type;
  if (s == "sub") return Slot::Sub;
  if (s == "basic") return Slot::Basic;
  if (s == "super") return Slot::Super;
  throw std::invalid_argument("unknown slot name: " + s);
}

inline int slot_rank(Slot s) { return static_cast<int>(s); }

inline bool is_taxonomy_slot(Slot s) {
  return s == Slot::Sub || s == Slot::Basic || s == Slot::Super;
}

struct Taxonomy {
  std::string sub, basic, super;
};

/// Attribute bundle of one scene object. `type` is mandatory; size/color and
/// the taxonomy triple are present only where the stimuli vary on them.
struct FeatureBundle {
  std::optional<std::string> size;
  std::optional<std::string> color;
  std::string type;
  std::optional<Taxonomy> taxonomy;

  std::optional<std::string> value(Slot s) const {
    switch (s) {
      case Slot::Size: return size;
      case Slot::Color: return color;
      case Slot::Type: return type.empty() ? std::nullopt : std::optional<std::string>(type);
      case Slot::Sub: return taxonomy ? std::optional<std::string>(taxonomy->sub) : std::nullopt;
      case Slot::Basic: return taxonomy ? std::optional<std::string>(taxonomy->basic) : std::nullopt;
      case Slot::Super: return taxonomy ? std::optional<std::string>(taxonomy->super) : std::nullopt;
    }
    return std::nullopt;
  }
};

struct SceneObject {
  std::string id;
  FeatureBundle features;
};

struct Term {
  Slot slot;
  std::string label;
  friend bool operator==(const Term& a, const Term& b) {
    return a.slot == b.slot && a.label == b.label;
  }
};

/// A (possibly multi-word) referring expression: one term per feature slot,
/// kept in canonical slot order (size before color before type level).
class Utterance {
 public:
  explicit Utterance(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("utterance needs at least one term");
    std::stable_sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
      return slot_rank(a.slot) < slot_rank(b.slot);
    });
    int taxo = 0;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (terms_[i].label.empty()) throw std::invalid_argument("utterance term has empty label");
      if (i > 0 && terms_[i].slot == terms_[i - 1].slot)
        throw std::invalid_argument("utterance repeats slot " + std::string(to_string(terms_[i].slot)));
      if (is_taxonomy_slot(terms_[i].slot)) ++taxo;
    }
    if (taxo > 1) throw std::invalid_argument("utterance mixes taxonomy levels");
    if (taxo > 0 && has_slot(Slot::Type))
      throw std::invalid_argument("utterance mixes a taxonomy level with a type term");
  }

  static Utterance single(Slot s, std::string label) {
    return Utterance({Term{s, std::move(label)}});
  }

  const std::vector<Term>& terms() const { return terms_; }

  bool has_slot(Slot s) const {
    for (const Term& t : terms_)
      if (t.slot == s) return true;
    return false;
  }

  std::string text() const {
    std::string out;
    for (const Term& t : terms_) {
      if (!out.empty()) out += ' ';
      out += t.label;
    }
    return out;
  }

  /// Slot signature used for aggregating prediction rows ("size-color" etc).
  std::string aggregate_class() const {
    std::string out;
    for (const Term& t : terms_) {
      if (!out.empty()) out += '-';
      out += to_string(t.slot);
    }
    return out;
  }

  friend bool operator==(const Utterance& a, const Utterance& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Utterance& a, const Utterance& b) { return a.text() < b.text(); }

 private:
  std::vector<Term> terms_;
};

/// A referential scene: all candidate objects, the intended referent, and a
/// (normalized) salience prior over objects.
struct ReferenceContext {
  std::string id = "ctx";
  std::vector<SceneObject> objects;
  std::string target_id;
  std::map<std::string, double> prior;

  const SceneObject& target() const {
    for (const SceneObject& o : objects)
      if (o.id == target_id) return o;
    throw std::logic_error("context " + id + " lost its target");
  }

  int index_of(const std::string& oid) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i].id == oid) return static_cast<int>(i);
    return -1;
  }

  double prior_of(const std::string& oid) const {
    auto it = prior.find(oid);
    if (it == prior.end()) throw std::invalid_argument("no prior entry for object " + oid);
    return it->second;
  }
};

/// Builds a validated context. An empty prior means uniform; otherwise the
/// prior must cover exactly the object ids and is normalized to sum one.
inline ReferenceContext make_context(std::vector<SceneObject> objects, std::string target_id,
                                     std::map<std::string, double> prior = {},
                                     std::string id = "ctx") {
  if (objects.size() < 2) throw std::invalid_argument("context needs at least two objects");
  std::set<std::string> ids;
  for (const SceneObject& o : objects) {
    if (o.id.empty()) throw std::invalid_argument("object with empty id");
    if (o.features.type.empty())
      throw std::invalid_argument("object " + o.id + " has an empty type");
    if (!ids.insert(o.id).second) throw std::invalid_argument("duplicate object id " + o.id);
  }
  if (!ids.count(target_id)) throw std::invalid_argument("target " + target_id + " not in context");

  ReferenceContext ctx;
  ctx.id = std::move(id);
  ctx.objects = std::move(objects);
  ctx.target_id = std::move(target_id);
  if (prior.empty()) {
    for (const SceneObject& o : ctx.objects)
      ctx.prior[o.id] = 1.0 / static_cast<double>(ctx.objects.size());
  } else {
    double total = 0;
    for (const auto& [oid, p] : prior) {
      if (!ids.count(oid)) throw std::invalid_argument("prior names unknown object " + oid);
      if (p < 0) throw std::invalid_argument("negative prior for object " + oid);
      total += p;
    }
    if (prior.size() != ids.size()) throw std::invalid_argument("prior must cover every object");
    if (total <= 0) throw std::invalid_argument("prior mass is zero");
    for (auto& [oid, p] : prior) ctx.prior[oid] = p / total;
  }
  return ctx;
}

/// Fraction of distractors whose value on `insufficient_slot` differs from
/// the target's. Every object must carry a value on that slot.
inline double scene_variation(const ReferenceContext& ctx, Slot insufficient_slot) {
  const auto tv = ctx.target().features.value(insufficient_slot);
  if (!tv)
    throw std::invalid_argument("target lacks slot " + std::string(to_string(insufficient_slot)));
  int n_diff = 0, n_total = 0;
  for (const SceneObject& o : ctx.objects) {
    if (o.id == ctx.target_id) continue;
    const auto v = o.features.value(insufficient_slot);
    if (!v)
      throw std::invalid_argument("object " + o.id + " lacks slot " +
                                  std::string(to_string(insufficient_slot)));
    ++n_total;
    if (*v != *tv) ++n_diff;
  }
  return static_cast<double>(n_diff) / static_cast<double>(n_total);
}

enum class AlternativeMode { SizeColorGrid, ContextualFeatures, TaxonomyLevels };

struct AlternativePolicy {
  AlternativeMode mode = AlternativeMode::SizeColorGrid;
};

namespace detail {

inline void add_unique_sorted(std::vector<Utterance>& out) {
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

}  // namespace detail

/// Deterministic utterance alternative sets.
///  - SizeColorGrid: full grid of size labels, color labels and size+color
///    pairs present in the context (type is ignored).
///  - ContextualFeatures: every feature-value combination attested on some
///    object, including each single feature value.
///  - TaxonomyLevels: the target's sub/basic/super labels.
/// Results are deduplicated and sorted lexicographically by surface text.
inline std::vector<Utterance> enumerate_alternatives(const ReferenceContext& ctx,
                                                     AlternativePolicy policy) {
  std::vector<Utterance> out;
  switch (policy.mode) {
    case AlternativeMode::SizeColorGrid: {
      std::set<std::string> sizes, colors;
      for (const SceneObject& o : ctx.objects) {
        if (o.features.size) sizes.insert(*o.features.size);
        if (o.features.color) colors.insert(*o.features.color);
      }
      if (sizes.empty() || colors.empty())
        throw std::invalid_argument("size-color grid needs size and color features in context " +
                                    ctx.id);
      for (const std::string& s : sizes) out.push_back(Utterance::single(Slot::Size, s));
      for (const std::string& c : colors) out.push_back(Utterance::single(Slot::Color, c));
      for (const std::string& s : sizes)
        for (const std::string& c : colors)
          out.push_back(Utterance({Term{Slot::Size, s}, Term{Slot::Color, c}}));
      break;
    }
    case AlternativeMode::ContextualFeatures: {
      const Slot slots[] = {Slot::Size, Slot::Color, Slot::Type};
      for (const SceneObject& o : ctx.objects) {
        std::vector<Term> present;
        for (Slot s : slots)
          if (auto v = o.features.value(s)) present.push_back(Term{s, *v});
        const std::size_t n = present.size();
        for (std::size_t mask = 1; mask < (1u << n); ++mask) {
          std::vector<Term> terms;
          for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) terms.push_back(present[i]);
          out.push_back(Utterance(std::move(terms)));
        }
      }
      break;
    }
    case AlternativeMode::TaxonomyLevels: {
      const auto& t = ctx.target().features;
      if (!t.taxonomy)
        throw std::invalid_argument("taxonomy alternatives need a taxonomy on the target of " +
                                    ctx.id);
      out.push_back(Utterance::single(Slot::Sub, t.taxonomy->sub));
      out.push_back(Utterance::single(Slot::Basic, t.taxonomy->basic));
      out.push_back(Utterance::single(Slot::Super, t.taxonomy->super));
      break;
    }
  }
  detail::add_unique_sorted(out);
  if (out.empty()) throw std::invalid_argument("empty alternative set for context " + ctx.id);
  return out;
}

}  // namespace csrsa
