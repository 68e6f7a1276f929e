#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dc/kg/decimal.hpp"

namespace dc::ingest {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based physical line on which each data row starts.
  std::vector<std::size_t> row_lines;
};

// RFC 4180: comma separated, double-quoted fields may contain commas, CRLF
// and doubled quotes. LF line endings are accepted too; a leading UTF-8 BOM
// is dropped. Throws Error(kCsvMalformed) with the offending line on an
// unterminated quote, stray quote, or a row wider than the header, and
// Error(kEncoding) on invalid UTF-8.
CsvTable parse_csv(std::string_view text);

// Decimal or scientific notation with optional comma thousands separators
// and surrounding whitespace. nullopt for anything else, including "".
std::optional<kg::Decimal> parse_csv_number(std::string_view cell);

}  // namespace dc::ingest
