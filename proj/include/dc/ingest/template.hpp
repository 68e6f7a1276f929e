#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dc/kg/types.hpp"

namespace dc::ingest {

// Placeholder in description values that is replaced by the entity cell.
inline constexpr std::string_view kCellPlaceholder = "{}";

struct ColumnBinding {
  std::string column;
  kg::Dcid variable;
  std::optional<kg::Dcid> unit;
  kg::Decimal scale = kg::Decimal::from_int(1);  // > 0

  bool operator==(const ColumnBinding&) const = default;
};

// How a CSV file maps onto observations.
//
//   [entity]
//   column = "State"
//   description = { name = "{}", typeOf = "AdministrativeArea1" }
//   # or: dcid = true   (the cell already holds a dcid)
//
//   [date]
//   column = "Year"     # or: fixed = "2021"
//
//   [[variables]]
//   column = "Population"
//   variable = "dc/var/TotalPop"
//   unit = "Person"     # optional
//   scale = 1000        # optional, > 0
//
//   [provenance]
//   dcid = "prov/acs"
//   source_url = "https://..."
//   import_name = "ACS 5-year"
//   import_date = "2024-02-01"
struct CsvTemplate {
  std::string entity_column;
  // Description shape; values containing "{}" are filled from the cell.
  std::map<kg::Dcid, std::string> entity_description;
  bool entity_is_dcid = false;
  std::optional<std::string> date_column;
  std::optional<kg::PartialDate> fixed_date;
  std::vector<ColumnBinding> variables;
  kg::Provenance provenance;

  bool operator==(const CsvTemplate&) const = default;
};

// Throws Error(kTemplateInvalid) for syntax errors, missing sections, a
// non-positive scale, or both/neither of date column and fixed date.
CsvTemplate parse_template(std::string_view toml_text);

}  // namespace dc::ingest
