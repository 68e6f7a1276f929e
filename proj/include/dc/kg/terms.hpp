#pragma once

#include <string>
#include <string_view>

#include "dc/kg/types.hpp"

// Core vocabulary terms referenced from code.
namespace dc::terms {

inline constexpr std::string_view kTypeOf = "typeOf";
inline constexpr std::string_view kName = "name";
inline constexpr std::string_view kSubClassOf = "subClassOf";
inline constexpr std::string_view kDomainIncludes = "domainIncludes";
inline constexpr std::string_view kRangeIncludes = "rangeIncludes";
inline constexpr std::string_view kPopulationType = "populationType";
inline constexpr std::string_view kMeasuredProperty = "measuredProperty";
inline constexpr std::string_view kStatType = "statType";
inline constexpr std::string_view kConstraintProperties = "constraintProperties";
inline constexpr std::string_view kContainedInPlace = "containedInPlace";
inline constexpr std::string_view kUnit = "unit";
inline constexpr std::string_view kValue = "value";
inline constexpr std::string_view kObservationDate = "observationDate";
inline constexpr std::string_view kObservationAbout = "observationAbout";
inline constexpr std::string_view kVariableMeasured = "variableMeasured";
inline constexpr std::string_view kMeasurementMethod = "measurementMethod";

inline constexpr std::string_view kThing = "Thing";
inline constexpr std::string_view kClass = "Class";
inline constexpr std::string_view kProperty = "Property";
inline constexpr std::string_view kStatisticalVariable = "StatisticalVariable";
inline constexpr std::string_view kStatVarObservation = "StatVarObservation";
inline constexpr std::string_view kStatTypeClass = "StatType";
inline constexpr std::string_view kUnitOfMeasure = "UnitOfMeasure";

// Literal-kind markers usable in rangeIncludes.
inline constexpr std::string_view kText = "Text";
inline constexpr std::string_view kNumber = "Number";
inline constexpr std::string_view kDate = "Date";
inline constexpr std::string_view kQuantity = "Quantity";
inline constexpr std::string_view kQuantityRange = "QuantityRange";
inline constexpr std::string_view kLatLng = "LatLng";

inline constexpr std::string_view kCoreProvenance = "prov/core-vocab";

// Derived-index depth cap for containedInPlace closure.
inline constexpr int kContainmentDepthCap = 8;

inline kg::Dcid id(std::string_view term) { return kg::Dcid(std::string(term)); }

}  // namespace dc::terms
