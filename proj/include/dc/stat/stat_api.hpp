#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dc/kg/store.hpp"
#include "dc/kg/types.hpp"

namespace dc::stat {

// A dated, provenanced value of a statistical variable about an entity. In
// the graph it is a StatVarObservation node; this struct is a view of that
// node's triples.
struct Observation {
  kg::Dcid variable;
  kg::Dcid entity;
  kg::PartialDate date;
  kg::Decimal value;
  std::optional<kg::Dcid> unit;
  std::optional<kg::Dcid> measurement_method;
  kg::Dcid provenance;

  bool operator==(const Observation&) const = default;
};

struct SeriesPoint {
  kg::PartialDate date;
  kg::Decimal value;
  kg::Dcid provenance;
  bool operator==(const SeriesPoint&) const = default;
};

// Points strictly ascending by date, one per date.
struct Series {
  kg::Dcid variable;
  kg::Dcid entity;
  std::vector<SeriesPoint> points;
  bool operator==(const Series&) const = default;
};

struct CollectionRow {
  kg::Dcid entity;
  Observation observation;
  bool operator==(const CollectionRow&) const = default;
};

// A concrete date, or nullopt for the latest date present.
using DateSelector = std::optional<kg::PartialDate>;
inline constexpr std::nullopt_t kLatest = std::nullopt;

// Date bounds compare whole periods: `date` is in [start, end] iff its first
// day is on or after start's first day and on or before end's last day, so
// an end bound of 2019 includes 2019-06.
bool in_range(const kg::PartialDate& date, const std::optional<kg::PartialDate>& start,
              const std::optional<kg::PartialDate>& end);

// When several provenances report the same (variable, entity, date), the one
// with the greatest import date wins, then the smallest provenance dcid.
std::optional<Observation> get_point(const kg::Store& store, const kg::Dcid& variable,
                                     const kg::Dcid& entity, const DateSelector& date);

// Throws Error(kInvalidRange) when start > end.
Series get_series(const kg::Store& store, const kg::Dcid& variable, const kg::Dcid& entity,
                  const std::optional<kg::PartialDate>& start = std::nullopt,
                  const std::optional<kg::PartialDate>& end = std::nullopt);

// One row per node typed child_type that is (transitively) containedInPlace
// parent and has data at the selected date. Ordered by entity dcid.
std::vector<CollectionRow> get_collection(const kg::Store& store, const kg::Dcid& variable,
                                          const kg::Dcid& parent, const kg::Dcid& child_type,
                                          const DateSelector& date);

// Same selection as get_collection over an explicit entity list.
std::vector<CollectionRow> get_rows(const kg::Store& store, const kg::Dcid& variable,
                                    std::span<const kg::Dcid> entities, const DateSelector& date);

std::vector<kg::Dcid> list_variables(const kg::Store& store, const kg::Dcid& entity);

// Graph form of an observation. The node dcid is derived from everything but
// the value, so re-importing the same cell maps to the same node.
kg::Dcid observation_node(const Observation& obs);
std::vector<kg::Triple> observation_triples(const Observation& obs);
std::vector<kg::Triple> observation_triples(const Observation& obs, const kg::Dcid& node);
// Reads an observation node back; nullopt when the node is not a complete
// StatVarObservation.
std::optional<Observation> read_observation(const kg::Store& store, const kg::Dcid& node);

}  // namespace dc::stat
