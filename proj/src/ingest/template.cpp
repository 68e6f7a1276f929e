#include "dc/ingest/template.hpp"

#include <algorithm>

#include <toml.hpp>

#include "dc/error.hpp"

namespace dc::ingest {

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kTemplateInvalid, what);
}

std::string required_string(const toml::table& t, std::string_view key, std::string_view where) {
  auto v = t[key].value<std::string>();
  if (!v || v->empty()) invalid(std::string(where) + "." + std::string(key) + " is required");
  return *v;
}

kg::Dcid dcid_field(const std::string& text, std::string_view where) {
  if (!kg::Dcid::is_valid(text)) invalid(std::string(where) + ": malformed dcid '" + text + "'");
  return kg::Dcid(text);
}

// Accepts a quoted partial date or a native TOML local date.
std::optional<kg::PartialDate> date_field(toml::node_view<const toml::node> node,
                                          std::string_view where) {
  if (!node) return std::nullopt;
  if (auto d = node.value<toml::date>()) return kg::PartialDate{d->year, d->month, d->day};
  auto text = node.value<std::string>();
  std::optional<kg::PartialDate> parsed;
  if (text) parsed = kg::PartialDate::try_parse(*text);
  if (!parsed) invalid(std::string(where) + " is not a date");
  return parsed;
}

void only_keys(const toml::table& t, std::initializer_list<std::string_view> allowed,
               std::string_view where) {
  for (const auto& [key, _] : t) {
    if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end())
      invalid(std::string(where) + ": unknown key '" + std::string(key.str()) + "'");
  }
}

}  // namespace

CsvTemplate parse_template(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    invalid("template syntax: " + std::string(e.description()) + " at line " +
            std::to_string(e.source().begin.line));
  }

  CsvTemplate t;
  // Typos should fail loudly rather than silently drop a setting.
  only_keys(root, {"entity", "date", "variables", "provenance"}, "template");

  const toml::table* entity = root["entity"].as_table();
  if (!entity) invalid("[entity] section is required");
  only_keys(*entity, {"column", "description", "dcid"}, "entity");
  t.entity_column = required_string(*entity, "column", "entity");
  t.entity_is_dcid = (*entity)["dcid"].value_or(false);
  if (const toml::table* desc = (*entity)["description"].as_table()) {
    for (const auto& [key, value] : *desc) {
      auto text = value.value<std::string>();
      if (!text) invalid("entity.description." + std::string(key.str()) + " must be a string");
      t.entity_description.emplace(dcid_field(std::string(key.str()), "entity.description"),
                                   *text);
    }
  }
  if (t.entity_is_dcid == !t.entity_description.empty())
    invalid("entity needs exactly one of description or dcid = true");

  const toml::table* date = root["date"].as_table();
  if (!date) invalid("[date] section is required");
  only_keys(*date, {"column", "fixed"}, "date");
  if (auto col = (*date)["column"].value<std::string>()) t.date_column = *col;
  t.fixed_date = date_field((*date)["fixed"], "date.fixed");
  if (t.date_column.has_value() == t.fixed_date.has_value())
    invalid("date needs exactly one of column or fixed");

  const toml::array* vars = root["variables"].as_array();
  if (!vars || vars->empty()) invalid("at least one [[variables]] binding is required");
  for (const auto& node : *vars) {
    const toml::table* v = node.as_table();
    if (!v) invalid("[[variables]] entries must be tables");
    only_keys(*v, {"column", "variable", "unit", "scale"}, "variables");
    ColumnBinding b;
    b.column = required_string(*v, "column", "variables");
    b.variable = dcid_field(required_string(*v, "variable", "variables"), "variables.variable");
    if (auto unit = (*v)["unit"].value<std::string>()) b.unit = dcid_field(*unit, "variables.unit");
    if (auto scale = (*v)["scale"]; scale) {
      std::optional<kg::Decimal> parsed;
      if (auto i = scale.value<std::int64_t>(); i && scale.is_integer()) {
        parsed = kg::Decimal::from_int(*i);
      } else if (auto d = scale.value<double>()) {
        parsed = kg::Decimal::from_double(*d);
      } else if (auto s = scale.value<std::string>()) {
        parsed = kg::Decimal::try_parse(*s);
      }
      if (!parsed || parsed->to_double() <= 0) invalid("variables.scale must be > 0");
      b.scale = *parsed;
    }
    t.variables.push_back(std::move(b));
  }

  const toml::table* prov = root["provenance"].as_table();
  if (!prov) invalid("[provenance] section is required");
  only_keys(*prov, {"dcid", "source_url", "import_name", "import_date"}, "provenance");
  t.provenance.dcid = dcid_field(required_string(*prov, "dcid", "provenance"), "provenance.dcid");
  t.provenance.source_url = (*prov)["source_url"].value_or(std::string());
  t.provenance.import_name = (*prov)["import_name"].value_or(std::string());
  auto import_date = date_field((*prov)["import_date"], "provenance.import_date");
  if (!import_date) invalid("provenance.import_date is required");
  t.provenance.import_date = *import_date;
  return t;
}

}  // namespace dc::ingest
