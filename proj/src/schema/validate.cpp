#include "dc/schema/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "dc/kg/terms.hpp"
#include "dc/schema/statvar.hpp"

namespace dc::schema {
namespace {

using kg::Dcid;
using kg::Triple;
using DcidSet = std::set<Dcid>;

struct PropertyInfo {
  DcidSet domains;
  DcidSet ranges;
};

std::string_view literal_marker(kg::ValueKind kind) {
  switch (kind) {
    case kg::ValueKind::kText: return terms::kText;
    case kg::ValueKind::kNumber: return terms::kNumber;
    case kg::ValueKind::kDate: return terms::kDate;
    case kg::ValueKind::kQuantity: return terms::kQuantity;
    case kg::ValueKind::kQuantityRange: return terms::kQuantityRange;
    case kg::ValueKind::kLatLng: return terms::kLatLng;
    case kg::ValueKind::kRef: break;
  }
  return {};
}

bool is_literal_marker(const Dcid& d) {
  const std::string& s = d.str();
  return s == terms::kText || s == terms::kNumber || s == terms::kDate || s == terms::kQuantity ||
         s == terms::kQuantityRange || s == terms::kLatLng;
}

class Model {
 public:
  explicit Model(const kg::Store& graph) {
    graph.for_each_triple([&](const Triple& t) {
      triples_.push_back(t);
      const std::string& p = t.predicate.str();
      const Dcid* ref = t.object.as_ref();
      if (!ref) return;
      if (p == terms::kTypeOf) {
        types_[t.subject].insert(*ref);
      } else if (p == terms::kSubClassOf) {
        parents_[t.subject].insert(*ref);
      } else if (p == terms::kDomainIncludes) {
        properties_[t.subject].domains.insert(*ref);
      } else if (p == terms::kRangeIncludes) {
        properties_[t.subject].ranges.insert(*ref);
      } else if (p == terms::kContainedInPlace) {
        containment_[t.subject].insert(*ref);
      }
    });
  }

  const std::vector<Triple>& triples() const { return triples_; }

  const DcidSet& types_of(const Dcid& node) const {
    static const DcidSet kEmpty;
    auto it = types_.find(node);
    return it == types_.end() ? kEmpty : it->second;
  }

  bool has_type(const Dcid& node, std::string_view type) const {
    const auto& ts = types_of(node);
    return std::any_of(ts.begin(), ts.end(), [&](const Dcid& d) { return d.str() == type; });
  }

  bool is_declared_class(const Dcid& cls) const {
    return has_type(cls, terms::kClass) || has_type(cls, "DataType") ||
           parents_.count(cls) > 0;
  }

  const PropertyInfo* property(const Dcid& p) const {
    if (!has_type(p, terms::kProperty)) return nullptr;
    static const PropertyInfo kBare;
    auto it = properties_.find(p);
    return it == properties_.end() ? &kBare : &it->second;
  }

  const DcidSet& ancestors(const Dcid& cls) const {
    auto it = ancestor_cache_.find(cls);
    if (it != ancestor_cache_.end()) return it->second;
    DcidSet seen{cls};
    std::vector<Dcid> stack{cls};
    while (!stack.empty()) {
      Dcid c = stack.back();
      stack.pop_back();
      if (auto p = parents_.find(c); p != parents_.end()) {
        for (const Dcid& parent : p->second) {
          if (seen.insert(parent).second) stack.push_back(parent);
        }
      }
    }
    return ancestor_cache_.emplace(cls, std::move(seen)).first->second;
  }

  // True when some declared class among `types` is (a subclass of) a member
  // of `allowed`. nullopt when none of the types is declared.
  std::optional<bool> conforms(const DcidSet& types, const DcidSet& allowed) const {
    bool any_declared = false;
    for (const Dcid& t : types) {
      if (!is_declared_class(t)) continue;
      any_declared = true;
      const DcidSet& up = ancestors(t);
      for (const Dcid& a : allowed) {
        if (up.count(a)) return true;
      }
    }
    if (!any_declared) return std::nullopt;
    return false;
  }

  const std::map<Dcid, DcidSet>& containment() const { return containment_; }

 private:
  std::vector<Triple> triples_;
  std::map<Dcid, DcidSet> types_;
  std::map<Dcid, DcidSet> parents_;
  std::map<Dcid, PropertyInfo> properties_;
  std::map<Dcid, DcidSet> containment_;
  mutable std::map<Dcid, DcidSet> ancestor_cache_;
};

struct StatVarFacts {
  std::optional<Dcid> population_type;
  std::optional<Dcid> measured_property;
  std::optional<Dcid> stat_type;
  std::optional<Dcid> unit;
  DcidSet constraint_keys;
  std::map<Dcid, std::set<std::string>> values;  // predicate -> object keys
};

void check_triple(const Model& model, const Triple& t,
                  const std::map<Dcid, StatVarFacts>& statvars, std::vector<Violation>& out) {
  const PropertyInfo* info = model.property(t.predicate);
  if (!info) {
    out.push_back({ViolationKind::kUndeclaredProperty, t.subject, t.predicate,
                   "predicate '" + t.predicate.str() + "' is not typed Property"});
    return;
  }

  if (!info->ranges.empty()) {
    DcidSet class_ranges, literal_ranges;
    for (const Dcid& r : info->ranges) {
      (is_literal_marker(r) ? literal_ranges : class_ranges).insert(r);
    }
    if (const Dcid* target = t.object.as_ref()) {
      if (class_ranges.empty()) {
        out.push_back({ViolationKind::kRangeViolation, t.subject, t.predicate,
                       "reference to '" + target->str() + "' where a literal is expected"});
      } else if (model.conforms(model.types_of(*target), class_ranges) == false) {
        out.push_back({ViolationKind::kRangeViolation, t.subject, t.predicate,
                       "'" + target->str() + "' is outside the property's range"});
      }
    } else {
      const std::string_view marker = literal_marker(t.object.kind());
      const bool ok = std::any_of(literal_ranges.begin(), literal_ranges.end(),
                                  [&](const Dcid& r) { return r.str() == marker; });
      if (!ok) {
        out.push_back({ViolationKind::kRangeViolation, t.subject, t.predicate,
                       std::string(to_string(t.object.kind())) +
                           " literal is outside the property's range"});
      }
    }
  }

  if (!info->domains.empty()) {
    DcidSet subject_types = model.types_of(t.subject);
    if (auto sv = statvars.find(t.subject);
        sv != statvars.end() && sv->second.constraint_keys.count(t.predicate) &&
        sv->second.population_type) {
      subject_types = {*sv->second.population_type};
    }
    if (model.conforms(subject_types, info->domains) == false) {
      out.push_back({ViolationKind::kDomainViolation, t.subject, t.predicate,
                     "subject type is outside the property's domain"});
    }
  }
}

void check_statvars(const std::map<Dcid, StatVarFacts>& statvars, std::vector<Violation>& out) {
  using Signature = std::tuple<Dcid, Dcid, Dcid, std::vector<std::pair<Dcid, std::string>>,
                               std::optional<Dcid>>;
  std::map<Signature, Dcid> seen;
  for (const auto& [dcid, f] : statvars) {
    if (!f.population_type || !f.measured_property || !f.stat_type) {
      out.push_back({ViolationKind::kIncompleteStatVar, dcid, std::nullopt,
                     "missing populationType, measuredProperty or statType"});
      continue;
    }
    if (!is_known_stat_type(f.stat_type->str())) {
      out.push_back({ViolationKind::kUnknownStatType, dcid, Dcid(std::string(terms::kStatType)),
                     "unknown statType '" + f.stat_type->str() + "'"});
    }
    std::vector<std::pair<Dcid, std::string>> constraints;
    for (const Dcid& key : f.constraint_keys) {
      auto v = f.values.find(key);
      if (v == f.values.end()) {
        out.push_back({ViolationKind::kIncompleteStatVar, dcid, key,
                       "constraint '" + key.str() + "' has no value"});
        continue;
      }
      for (const std::string& value : v->second) constraints.emplace_back(key, value);
    }
    Signature sig{*f.population_type, *f.measured_property, *f.stat_type, constraints, f.unit};
    auto [it, inserted] = seen.emplace(std::move(sig), dcid);
    if (!inserted) {
      out.push_back({ViolationKind::kDuplicateStatVar, dcid, std::nullopt,
                     "same definition as '" + it->second.str() + "'"});
    }
  }
}

void check_cycles(const Model& model, std::vector<Violation>& out) {
  enum class Mark { kNone, kActive, kDone };
  std::map<Dcid, Mark> marks;
  std::vector<Dcid> path;
  std::set<std::vector<Dcid>> cycles;

  std::function<void(const Dcid&)> visit = [&](const Dcid& node) {
    marks[node] = Mark::kActive;
    path.push_back(node);
    if (auto it = model.containment().find(node); it != model.containment().end()) {
      for (const Dcid& next : it->second) {
        const Mark m = marks.count(next) ? marks[next] : Mark::kNone;
        if (m == Mark::kActive) {
          auto start = std::find(path.begin(), path.end(), next);
          std::vector<Dcid> cycle(start, path.end());
          std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
          cycles.insert(std::move(cycle));
        } else if (m == Mark::kNone) {
          visit(next);
        }
      }
    }
    path.pop_back();
    marks[node] = Mark::kDone;
  };
  for (const auto& [node, _] : model.containment()) {
    if (!marks.count(node)) visit(node);
  }
  for (const auto& cycle : cycles) {
    std::string detail = "containedInPlace cycle:";
    for (const Dcid& d : cycle) detail += " " + d.str();
    out.push_back({ViolationKind::kContainmentCycle, cycle.front(),
                   Dcid(std::string(terms::kContainedInPlace)), detail});
  }
}

}  // namespace

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kUndeclaredProperty: return "UndeclaredProperty";
    case ViolationKind::kRangeViolation: return "RangeViolation";
    case ViolationKind::kDomainViolation: return "DomainViolation";
    case ViolationKind::kDuplicateStatVar: return "DuplicateStatVar";
    case ViolationKind::kIncompleteStatVar: return "IncompleteStatVar";
    case ViolationKind::kUnknownStatType: return "UnknownStatType";
    case ViolationKind::kContainmentCycle: return "ContainmentCycle";
  }
  return "?";
}

bool is_warning(ViolationKind kind) {
  return kind == ViolationKind::kUndeclaredProperty || kind == ViolationKind::kUnknownStatType;
}

std::vector<Violation> validate(const kg::Store& graph) {
  const Model model(graph);

  std::map<Dcid, StatVarFacts> statvars;
  for (const Triple& t : model.triples()) {
    if (!model.has_type(t.subject, terms::kStatisticalVariable)) continue;
    StatVarFacts& f = statvars[t.subject];
    const std::string& p = t.predicate.str();
    const Dcid* ref = t.object.as_ref();
    if (p == terms::kPopulationType && ref && !f.population_type) f.population_type = *ref;
    if (p == terms::kMeasuredProperty && ref && !f.measured_property) f.measured_property = *ref;
    if (p == terms::kStatType && ref && !f.stat_type) f.stat_type = *ref;
    if (p == terms::kUnit && ref && !f.unit) f.unit = *ref;
    if (p == terms::kConstraintProperties && ref) f.constraint_keys.insert(*ref);
    f.values[t.predicate].insert(t.object.key());
  }

  std::vector<Violation> out;
  for (const Triple& t : model.triples()) check_triple(model, t, statvars, out);
  check_statvars(statvars, out);
  check_cycles(model, out);

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.subject, a.kind, a.predicate, a.detail) <
           std::tie(b.subject, b.kind, b.predicate, b.detail);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace dc::schema
