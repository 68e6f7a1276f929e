#include "dc/schema/statvar.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <set>

#include "dc/error.hpp"
#include "dc/kg/terms.hpp"

namespace dc::schema {
namespace {

using kg::Dcid;
using kg::Direction;
using kg::Triple;

std::optional<Dcid> first_ref(const std::vector<Triple>& triples, std::string_view predicate) {
  for (const Triple& t : triples) {
    if (t.predicate.str() == predicate && t.object.as_ref()) return *t.object.as_ref();
  }
  return std::nullopt;
}

bool has_type(const std::vector<Triple>& triples, std::string_view type) {
  return std::any_of(triples.begin(), triples.end(), [&](const Triple& t) {
    return t.predicate.str() == terms::kTypeOf && t.object.as_ref() &&
           t.object.as_ref()->str() == type;
  });
}

}  // namespace

bool is_known_stat_type(std::string_view dcid) {
  static constexpr std::array<std::string_view, 7> kKnown = {
      "measuredValue", "count", "mean", "median", "min", "max", "growthRate"};
  return std::find(kKnown.begin(), kKnown.end(), dcid) != kKnown.end();
}

std::vector<Dcid> superclasses(const Dcid& cls, const kg::Store& graph) {
  std::set<Dcid> seen{cls};
  std::deque<Dcid> queue{cls};
  while (!queue.empty()) {
    Dcid c = std::move(queue.front());
    queue.pop_front();
    for (const Triple& t : graph.neighbors(c, terms::id(terms::kSubClassOf), Direction::kOut)) {
      if (const Dcid* parent = t.object.as_ref(); parent && seen.insert(*parent).second) {
        queue.push_back(*parent);
      }
    }
  }
  return {seen.begin(), seen.end()};
}

StatVarDecomposition decompose(const Dcid& variable, const kg::Store& graph) {
  const auto triples = graph.node_triples(variable, Direction::kOut);
  if (!has_type(triples, terms::kStatisticalVariable)) {
    throw Error(ErrorCode::kNotAStatVar, "'" + variable.str() + "' is not a StatisticalVariable");
  }
  auto required = [&](std::string_view predicate) {
    auto v = first_ref(triples, predicate);
    if (!v) {
      throw Error(ErrorCode::kMissingRequiredProperty,
                  "'" + variable.str() + "' lacks " + std::string(predicate));
    }
    return *v;
  };
  StatVarDecomposition d;
  d.population_type = required(terms::kPopulationType);
  d.measured_property = required(terms::kMeasuredProperty);
  d.stat_type = required(terms::kStatType);
  d.unit = first_ref(triples, terms::kUnit);
  for (const Triple& t : triples) {
    if (t.predicate.str() != terms::kConstraintProperties || !t.object.as_ref()) continue;
    const Dcid& key = *t.object.as_ref();
    auto value = std::find_if(triples.begin(), triples.end(),
                              [&](const Triple& u) { return u.predicate == key; });
    if (value == triples.end()) {
      throw Error(ErrorCode::kMissingRequiredProperty,
                  "'" + variable.str() + "' declares constraint " + key.str() + " without a value");
    }
    d.constraints.emplace(key, value->object);
  }
  return d;
}

std::vector<Triple> defining_triples(const Dcid& variable, const kg::Store& graph) {
  const StatVarDecomposition d = decompose(variable, graph);
  std::vector<Triple> out;
  for (const Triple& t : graph.node_triples(variable, Direction::kOut)) {
    const std::string& p = t.predicate.str();
    const Dcid* ref = t.object.as_ref();
    const bool defining =
        (p == terms::kTypeOf && ref && ref->str() == terms::kStatisticalVariable) ||
        (p == terms::kPopulationType && ref && *ref == d.population_type) ||
        (p == terms::kMeasuredProperty && ref && *ref == d.measured_property) ||
        (p == terms::kStatType && ref && *ref == d.stat_type) ||
        (p == terms::kUnit && ref && d.unit && *ref == *d.unit) ||
        (p == terms::kConstraintProperties && ref && d.constraints.count(*ref)) ||
        (d.constraints.count(t.predicate) && d.constraints.at(t.predicate) == t.object);
    if (defining) out.push_back(t);
  }
  return out;
}

std::vector<Triple> compose(const StatVarDecomposition& spec, const Dcid& variable,
                            const Dcid& provenance, const kg::Store& graph) {
  if (!spec.constraints.empty()) {
    const auto population_classes = superclasses(spec.population_type, graph);
    for (const auto& [key, value] : spec.constraints) {
      const auto key_triples = graph.node_triples(key, Direction::kOut);
      if (!has_type(key_triples, terms::kProperty)) {
        throw Error(ErrorCode::kInvalidConstraintProperty,
                    "constraint key '" + key.str() + "' is not a Property");
      }
      const bool in_domain = std::any_of(key_triples.begin(), key_triples.end(), [&](const Triple& t) {
        return t.predicate.str() == terms::kDomainIncludes && t.object.as_ref() &&
               std::binary_search(population_classes.begin(), population_classes.end(),
                                  *t.object.as_ref());
      });
      if (!in_domain) {
        throw Error(ErrorCode::kInvalidConstraintProperty,
                    "constraint key '" + key.str() + "' does not apply to " +
                        spec.population_type.str());
      }
    }
  }
  auto ref = [](std::string_view s) { return kg::NodeValue(Dcid(std::string(s))); };
  std::vector<Triple> out = {
      {variable, terms::id(terms::kTypeOf), ref(terms::kStatisticalVariable), provenance},
      {variable, terms::id(terms::kPopulationType), kg::NodeValue(spec.population_type), provenance},
      {variable, terms::id(terms::kMeasuredProperty), kg::NodeValue(spec.measured_property), provenance},
      {variable, terms::id(terms::kStatType), kg::NodeValue(spec.stat_type), provenance},
  };
  for (const auto& [key, value] : spec.constraints) {
    out.push_back({variable, terms::id(terms::kConstraintProperties), kg::NodeValue(key), provenance});
    out.push_back({variable, key, value, provenance});
  }
  if (spec.unit) out.push_back({variable, terms::id(terms::kUnit), kg::NodeValue(*spec.unit), provenance});
  return out;
}

}  // namespace dc::schema
