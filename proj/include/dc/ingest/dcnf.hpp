#pragma once

// DCNF: the line-oriented node file format used to import schema and entity
// triples.
//
//   # comment
//   @provenance prov/census2020        directive paragraph: sets the provenance
//   @source https://census.gov         of the blocks that follow; any of
//   @importName US Census 2020         @source/@importName/@importDate also
//   @importDate 2021-08-12             declares the provenance record
//
//   dcid: country/GEO                  one node per blank-line separated block
//   typeOf: dcid:Country
//   name: "Georgia"
//
// Values are typed by syntax:
//   "text"            text (escapes \" \\ \n \t)
//   dcid:X            reference to node X
//   l:alias           reference to a block declared with `alias: alias`
//   2019, 2019-06     date (YYYY, YYYY-MM, YYYY-MM-DD)
//   4080000, 1.5e3    number; write number:2019 for a four-digit integer
//   [10 Kilogram]     quantity
//   [1 5 Year]        quantity range, "-" for an open bound
//   [41.7 44.8]       latitude / longitude
//
// One value per property line; repeat the property for multi-valued arcs.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dc/kg/types.hpp"

namespace dc::ingest {

struct ParseError {
  std::size_t line = 0;
  std::string reason;
  bool operator==(const ParseError&) const = default;
};

struct NodeFileOptions {
  // Provenance for blocks appearing before any @provenance directive.
  std::optional<kg::Dcid> default_provenance;
};

struct ParsedNodeFile {
  std::vector<kg::Triple> triples;
  // Records declared by directives, in declaration order.
  std::vector<kg::Provenance> provenances;
  // Bad blocks are dropped and reported here; good blocks are kept.
  std::vector<ParseError> errors;
};

// Throws Error(kEncoding) when the input is not valid UTF-8.
ParsedNodeFile parse_node_file(std::string_view text, const NodeFileOptions& options = {});

// Parses a single value token; nullopt when the syntax is not recognized.
// Alias references (l:...) are not accepted here.
std::optional<kg::NodeValue> parse_value_token(std::string_view token);

bool is_valid_utf8(std::string_view text);

}  // namespace dc::ingest
