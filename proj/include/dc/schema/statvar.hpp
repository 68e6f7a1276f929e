#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "dc/kg/store.hpp"
#include "dc/kg/types.hpp"

namespace dc::schema {

// Structured meaning of a statistical variable: what population is counted,
// which property is measured, the statistic, and the constraining dimensions.
struct StatVarDecomposition {
  kg::Dcid population_type;
  kg::Dcid measured_property;
  kg::Dcid stat_type;
  std::map<kg::Dcid, kg::NodeValue> constraints;
  std::optional<kg::Dcid> unit;

  bool operator==(const StatVarDecomposition&) const = default;
};

// measuredValue, count, mean, median, min, max, growthRate.
bool is_known_stat_type(std::string_view dcid);

// Reads the variable's own triples. Throws Error(kNotAStatVar) or
// Error(kMissingRequiredProperty). Never looks at the dcid's text.
StatVarDecomposition decompose(const kg::Dcid& variable, const kg::Store& graph);

// Emits the defining triples of `variable`: typeOf, populationType,
// measuredProperty, statType, one constraintProperties arc and one value arc
// per constraint, and unit when present. Throws
// Error(kInvalidConstraintProperty) when a constraint key is not a Property
// in `graph` or its domains do not include the population type.
std::vector<kg::Triple> compose(const StatVarDecomposition& spec, const kg::Dcid& variable,
                                const kg::Dcid& provenance, const kg::Store& graph);

// The subset of the variable's out-triples that decompose reads.
std::vector<kg::Triple> defining_triples(const kg::Dcid& variable, const kg::Store& graph);

// `cls` and every class reachable over subClassOf.
std::vector<kg::Dcid> superclasses(const kg::Dcid& cls, const kg::Store& graph);

}  // namespace dc::schema
