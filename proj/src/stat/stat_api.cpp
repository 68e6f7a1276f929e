#include "dc/stat/stat_api.hpp"

#include <algorithm>
#include <map>

#include "dc/error.hpp"
#include "dc/kg/hash.hpp"
#include "dc/kg/terms.hpp"

namespace dc::stat {
namespace {

using kg::Dcid;
using kg::ObservationRow;
using kg::PartialDate;

// True when a is preferred over b for the same date.
bool preferred(const ObservationRow& a, const ObservationRow& b) {
  if (a.provenance_import_date != b.provenance_import_date) {
    return a.provenance_import_date > b.provenance_import_date;
  }
  if (a.provenance != b.provenance) return a.provenance < b.provenance;
  if (a.value != b.value) return a.value.str() < b.value.str();
  return a.node < b.node;
}

Observation to_observation(const ObservationRow& r) {
  return Observation{r.variable, r.entity, r.date, r.value, r.unit, r.measurement_method,
                     r.provenance};
}

// Best row per date, ascending by date.
std::vector<ObservationRow> best_per_date(std::vector<ObservationRow> rows) {
  std::map<PartialDate, ObservationRow> best;
  for (ObservationRow& r : rows) {
    auto it = best.find(r.date);
    if (it == best.end()) {
      best.emplace(r.date, std::move(r));
    } else if (preferred(r, it->second)) {
      it->second = std::move(r);
    }
  }
  std::vector<ObservationRow> out;
  out.reserve(best.size());
  for (auto& [date, row] : best) out.push_back(std::move(row));
  return out;
}

std::optional<Observation> pick(std::vector<ObservationRow> rows, const DateSelector& date) {
  if (date) {
    std::erase_if(rows, [&](const ObservationRow& r) { return r.date != *date; });
  }
  auto best = best_per_date(std::move(rows));
  if (best.empty()) return std::nullopt;
  return to_observation(best.back());
}

}  // namespace

bool in_range(const PartialDate& date, const std::optional<PartialDate>& start,
              const std::optional<PartialDate>& end) {
  const PartialDate first = date.first_day();
  if (start && first < start->first_day()) return false;
  if (end && first > end->last_day()) return false;
  return true;
}

std::optional<Observation> get_point(const kg::Store& store, const Dcid& variable,
                                     const Dcid& entity, const DateSelector& date) {
  return pick(store.observations(variable, entity), date);
}

Series get_series(const kg::Store& store, const Dcid& variable, const Dcid& entity,
                  const std::optional<PartialDate>& start, const std::optional<PartialDate>& end) {
  if (start && end && start->first_day() > end->last_day()) {
    throw Error(ErrorCode::kInvalidRange,
                "series start " + start->str() + " is after end " + end->str());
  }
  auto rows = store.observations(variable, entity);
  std::erase_if(rows, [&](const ObservationRow& r) { return !in_range(r.date, start, end); });
  Series s{variable, entity, {}};
  for (const ObservationRow& r : best_per_date(std::move(rows))) {
    s.points.push_back({r.date, r.value, r.provenance});
  }
  return s;
}

std::vector<CollectionRow> get_rows(const kg::Store& store, const Dcid& variable,
                                    std::span<const Dcid> entities, const DateSelector& date) {
  auto rows = store.observations_for_entities(variable, entities);
  std::map<Dcid, std::vector<ObservationRow>> by_entity;
  for (ObservationRow& r : rows) by_entity[r.entity].push_back(std::move(r));
  std::vector<CollectionRow> out;
  for (auto& [entity, entity_rows] : by_entity) {
    if (auto obs = pick(std::move(entity_rows), date)) out.push_back({entity, std::move(*obs)});
  }
  return out;
}

std::vector<CollectionRow> get_collection(const kg::Store& store, const Dcid& variable,
                                          const Dcid& parent, const Dcid& child_type,
                                          const DateSelector& date) {
  const auto children = store.contained_children(parent, child_type);
  return get_rows(store, variable, children, date);
}

std::vector<Dcid> list_variables(const kg::Store& store, const Dcid& entity) {
  return store.variables_for(entity);
}

Dcid observation_node(const Observation& obs) {
  std::string key = obs.variable.str() + "\n" + obs.entity.str() + "\n" + obs.date.str() + "\n" +
                    obs.provenance.str() + "\n" + (obs.unit ? obs.unit->str() : "") + "\n" +
                    (obs.measurement_method ? obs.measurement_method->str() : "");
  return Dcid("dc/o/" + kg::stable_hash_hex(key));
}

std::vector<kg::Triple> observation_triples(const Observation& obs) {
  return observation_triples(obs, observation_node(obs));
}

std::vector<kg::Triple> observation_triples(const Observation& obs, const Dcid& node) {
  using kg::NodeValue;
  std::vector<kg::Triple> out = {
      {node, terms::id(terms::kTypeOf), NodeValue(terms::id(terms::kStatVarObservation)),
       obs.provenance},
      {node, terms::id(terms::kVariableMeasured), NodeValue(obs.variable), obs.provenance},
      {node, terms::id(terms::kObservationAbout), NodeValue(obs.entity), obs.provenance},
      {node, terms::id(terms::kObservationDate), NodeValue(obs.date), obs.provenance},
      {node, terms::id(terms::kValue), NodeValue(obs.value), obs.provenance},
  };
  if (obs.unit) out.push_back({node, terms::id(terms::kUnit), NodeValue(*obs.unit), obs.provenance});
  if (obs.measurement_method) {
    out.push_back({node, terms::id(terms::kMeasurementMethod), NodeValue(*obs.measurement_method),
                   obs.provenance});
  }
  return out;
}

std::optional<Observation> read_observation(const kg::Store& store, const Dcid& node) {
  bool typed = false;
  std::optional<Dcid> variable, entity, unit, method;
  std::optional<PartialDate> date;
  std::optional<std::pair<kg::Decimal, Dcid>> value;
  for (const kg::Triple& t : store.node_triples(node, kg::Direction::kOut)) {
    const std::string& p = t.predicate.str();
    const Dcid* ref = t.object.as_ref();
    if (p == terms::kTypeOf && ref && ref->str() == terms::kStatVarObservation) typed = true;
    if (p == terms::kVariableMeasured && ref && !variable) variable = *ref;
    if (p == terms::kObservationAbout && ref && !entity) entity = *ref;
    if (p == terms::kUnit && ref && !unit) unit = *ref;
    if (p == terms::kMeasurementMethod && ref && !method) method = *ref;
    if (p == terms::kObservationDate && t.object.as_date() && !date) date = *t.object.as_date();
    if (p == terms::kValue && t.object.as_number() && !value) {
      value.emplace(*t.object.as_number(), t.provenance);
    }
  }
  if (!typed || !variable || !entity || !date || !value) return std::nullopt;
  return Observation{*variable, *entity, *date, value->first, unit, method, value->second};
}

}  // namespace dc::stat
