#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dc/ingest/dcnf.hpp"
#include "dc/ingest/template.hpp"
#include "dc/kg/store.hpp"
#include "dc/resolver/resolver.hpp"
#include "dc/schema/validate.hpp"

namespace dc::ingest {

struct RowSkip {
  std::size_t row = 0;  // 1-based data row (header excluded)
  std::string reason;
  bool operator==(const RowSkip&) const = default;
};

struct SourceError {
  std::string source;
  ParseError error;
  bool operator==(const SourceError&) const = default;
};

struct ImportReport {
  std::size_t triples_added = 0;
  std::size_t observations_added = 0;
  std::vector<RowSkip> rows_skipped;
  std::vector<schema::Violation> violations;
  std::vector<SourceError> parse_errors;

  bool operator==(const ImportReport&) const = default;
};

// Lookups an import may need beyond the target store. The server plugs in
// federated versions; unset members fall back to the target store.
struct ImportContext {
  std::function<resolver::ResolutionResult(const resolver::Description&)> resolve;
  std::function<bool(const kg::Dcid&)> is_stat_var;
};

// One CSV import, all-or-nothing. Rows whose entity does not resolve to a
// single top-scoring candidate are skipped ("Unresolved" / "Ambiguous"), as
// are rows with an unparseable date. Empty cells are ignored; other
// non-numeric cells are reported as skips. Throws Error(kTemplateInvalid)
// when the header lacks a bound column or a bound variable is not a
// StatisticalVariable, and Error(kCsvMalformed) for broken CSV syntax.
ImportReport import_csv(kg::Store& store, std::string_view csv, const CsvTemplate& tmpl,
                        const ImportContext& context = {});

enum class SourceKind { kNodes, kCsv };

struct ImportSource {
  SourceKind kind = SourceKind::kNodes;
  std::string name;  // for error messages
  std::string content;
  std::optional<CsvTemplate> csv_template;  // required for kCsv
};

// Reads files from disk; *.csv files use `template_path`. Throws Error(kIo)
// for unreadable files and Error(kTemplateInvalid) for CSVs without one.
std::vector<ImportSource> load_sources(std::span<const std::filesystem::path> paths,
                                       const std::optional<std::filesystem::path>& template_path);

// Core vocabulary (not counted), then per source parse and insert, then
// schema validation over the whole store, then derived-index rebuild.
// Stops at the first stage-level failure by rethrowing; sources already
// inserted stay inserted. Node-file block errors are collected, not thrown.
ImportReport import_and_validate(kg::Store& store, std::span<const ImportSource> sources,
                                 const ImportContext& context = {});

}  // namespace dc::ingest
