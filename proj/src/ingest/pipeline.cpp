#include "dc/ingest/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "dc/error.hpp"
#include "dc/ingest/csv.hpp"
#include "dc/kg/terms.hpp"
#include "dc/schema/vocabulary.hpp"
#include "dc/stat/stat_api.hpp"

namespace dc::ingest {

namespace {

std::string replace_placeholder(const std::string& pattern, const std::string& cell) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto hit = pattern.find(kCellPlaceholder, pos);
    if (hit == std::string::npos) break;
    out.append(pattern, pos, hit - pos);
    out += cell;
    pos = hit + kCellPlaceholder.size();
  }
  out.append(pattern, pos, std::string::npos);
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return std::string(s);
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (trim(table.header[i]) == name) return i;
  throw Error(ErrorCode::kTemplateInvalid, "CSV header has no column '" + name + "'");
}

bool local_is_stat_var(const kg::Store& store, const kg::Dcid& variable) {
  for (const kg::Triple& t : store.neighbors(variable, terms::id(terms::kTypeOf), kg::Direction::kOut))
    if (const kg::Dcid* cls = t.object.as_ref(); cls && cls->str() == terms::kStatisticalVariable)
      return true;
  return false;
}

// Resolves one entity cell; returns the dcid or the skip reason.
std::variant<kg::Dcid, std::string> resolve_entity(const std::string& cell, const CsvTemplate& tmpl,
                                                   const ImportContext& context,
                                                   const kg::Store& store) {
  if (cell.empty()) return std::string("Unresolved: empty entity cell");
  if (tmpl.entity_is_dcid) {
    if (!kg::Dcid::is_valid(cell)) return "Unresolved: malformed dcid '" + cell + "'";
    return kg::Dcid(cell);
  }
  resolver::Description d;
  for (const auto& [prop, pattern] : tmpl.entity_description)
    d.constraints.emplace(prop, replace_placeholder(pattern, cell));
  const resolver::ResolutionResult r =
      context.resolve ? context.resolve(d) : resolver::resolve(d, store);
  if (r.candidates.empty()) return "Unresolved: no entity matches '" + cell + "'";
  std::size_t top = 0;
  for (const resolver::Candidate& c : r.candidates)
    if (c.score == r.candidates.front().score) ++top;
  if (top > 1)
    return "Ambiguous: " + std::to_string(top) + " candidates match '" + cell + "'";
  return r.candidates.front().dcid;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ImportReport import_csv(kg::Store& store, std::string_view csv, const CsvTemplate& tmpl,
                        const ImportContext& context) {
  for (const ColumnBinding& b : tmpl.variables) {
    const bool ok = context.is_stat_var ? context.is_stat_var(b.variable)
                                        : local_is_stat_var(store, b.variable);
    if (!ok) {
      throw Error(ErrorCode::kTemplateInvalid,
                  "'" + b.variable.str() + "' is not a known StatisticalVariable");
    }
  }

  ImportReport report;
  const CsvTable table = parse_csv(csv);
  if (table.header.empty()) return report;

  const std::size_t entity_col = column_index(table, tmpl.entity_column);
  std::optional<std::size_t> date_col;
  if (tmpl.date_column) date_col = column_index(table, *tmpl.date_column);
  std::vector<std::size_t> value_cols;
  for (const ColumnBinding& b : tmpl.variables) value_cols.push_back(column_index(table, b.column));

  std::vector<kg::Triple> triples;
  // Index into `triples` of each observation's value triple.
  std::vector<std::size_t> value_positions;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t row_no = r + 1;

    kg::PartialDate date;
    if (date_col) {
      auto parsed = kg::PartialDate::try_parse(trim(row[*date_col]));
      if (!parsed) {
        report.rows_skipped.push_back({row_no, "InvalidDate: '" + row[*date_col] + "'"});
        continue;
      }
      date = *parsed;
    } else {
      date = *tmpl.fixed_date;
    }

    auto entity = resolve_entity(trim(row[entity_col]), tmpl, context, store);
    if (auto* reason = std::get_if<std::string>(&entity)) {
      report.rows_skipped.push_back({row_no, std::move(*reason)});
      continue;
    }
    const kg::Dcid& entity_dcid = std::get<kg::Dcid>(entity);

    std::vector<std::string> bad_cells;
    for (std::size_t v = 0; v < tmpl.variables.size(); ++v) {
      const ColumnBinding& b = tmpl.variables[v];
      const std::string cell = trim(row[value_cols[v]]);
      if (cell.empty()) continue;
      auto number = parse_csv_number(cell);
      if (!number) {
        bad_cells.push_back(b.column + "='" + cell + "'");
        continue;
      }
      stat::Observation obs{b.variable, entity_dcid,   date, *number * b.scale,
                            b.unit,     std::nullopt, tmpl.provenance.dcid};
      for (kg::Triple& t : stat::observation_triples(obs)) {
        if (t.predicate.str() == terms::kValue) value_positions.push_back(triples.size());
        triples.push_back(std::move(t));
      }
    }
    if (!bad_cells.empty()) {
      std::string reason = "NonNumeric:";
      for (const auto& c : bad_cells) reason += " " + c;
      report.rows_skipped.push_back({row_no, std::move(reason)});
    }
  }

  store.register_provenance(tmpl.provenance);
  std::vector<bool> fresh;
  report.triples_added = store.insert_triples(triples, &fresh);
  for (std::size_t pos : value_positions)
    if (fresh[pos]) ++report.observations_added;
  return report;
}

std::vector<ImportSource> load_sources(std::span<const std::filesystem::path> paths,
                                       const std::optional<std::filesystem::path>& template_path) {
  std::optional<CsvTemplate> tmpl;
  std::vector<ImportSource> out;
  for (const auto& path : paths) {
    ImportSource s;
    s.name = path.string();
    s.content = read_file(path);
    if (path.extension() == ".csv") {
      if (!template_path)
        throw Error(ErrorCode::kTemplateInvalid, s.name + ": CSV import needs a template");
      if (!tmpl) tmpl = parse_template(read_file(*template_path));
      s.kind = SourceKind::kCsv;
      s.csv_template = tmpl;
    }
    out.push_back(std::move(s));
  }
  return out;
}

ImportReport import_and_validate(kg::Store& store, std::span<const ImportSource> sources,
                                 const ImportContext& context) {
  schema::ensure_core_vocabulary(store);
  ImportReport report;
  for (const ImportSource& source : sources) {
    if (source.kind == SourceKind::kCsv) {
      if (!source.csv_template)
        throw Error(ErrorCode::kTemplateInvalid, source.name + ": CSV import needs a template");
      ImportReport part = import_csv(store, source.content, *source.csv_template, context);
      report.triples_added += part.triples_added;
      report.observations_added += part.observations_added;
      for (RowSkip& s : part.rows_skipped) report.rows_skipped.push_back(std::move(s));
      continue;
    }
    ParsedNodeFile parsed = parse_node_file(source.content);
    for (const ParseError& e : parsed.errors) report.parse_errors.push_back({source.name, e});
    for (const kg::Provenance& p : parsed.provenances) store.register_provenance(p);
    std::vector<bool> fresh;
    report.triples_added += store.insert_triples(parsed.triples, &fresh);
    for (std::size_t i = 0; i < parsed.triples.size(); ++i) {
      const kg::Triple& t = parsed.triples[i];
      if (fresh[i] && t.predicate.str() == terms::kValue) {
        // Only value arcs on observation nodes count as observations.
        for (const kg::Triple& ty :
             store.neighbors(t.subject, terms::id(terms::kTypeOf), kg::Direction::kOut)) {
          if (const kg::Dcid* c = ty.object.as_ref(); c && c->str() == terms::kStatVarObservation) {
            ++report.observations_added;
            break;
          }
        }
      }
    }
  }
  report.violations = schema::validate(store);
  store.rebuild_derived_indexes();
  return report;
}

}  // namespace dc::ingest
