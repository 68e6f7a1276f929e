#include "dc/ingest/csv.hpp"

#include <string>

#include "dc/error.hpp"
#include "dc/ingest/dcnf.hpp"

namespace dc::ingest {

namespace {

[[noreturn]] void malformed(std::size_t line, std::string_view what) {
  throw Error(ErrorCode::kCsvMalformed, "line " + std::to_string(line) + ": " + std::string(what));
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  if (!is_valid_utf8(text)) throw Error(ErrorCode::kEncoding, "CSV is not valid UTF-8");
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> lines;
  std::vector<std::string> record;
  std::string field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool in_quotes = false;
  bool field_quoted = false;
  bool any = false;  // anything seen on the current record

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    // A completely empty line is not a record.
    if (!(record.size() == 1 && record[0].empty() && !any)) {
      records.push_back(std::move(record));
      lines.push_back(record_line);
    }
    record.clear();
    any = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_quoted) malformed(line, "unexpected quote inside field");
        in_quotes = true;
        field_quoted = true;
        any = true;
        break;
      case ',':
        end_field();
        any = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        malformed(line, "bare carriage return");
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        if (field_quoted) malformed(line, "text after closing quote");
        field.push_back(c);
        any = true;
    }
  }
  if (in_quotes) malformed(record_line, "unterminated quoted field");
  if (any || !field.empty()) end_record();

  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() > table.header.size()) malformed(lines[r], "more fields than header");
    records[r].resize(table.header.size());
    table.rows.push_back(std::move(records[r]));
    table.row_lines.push_back(lines[r]);
  }
  return table;
}

std::optional<kg::Decimal> parse_csv_number(std::string_view cell) {
  auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  while (!cell.empty() && is_space(cell.front())) cell.remove_prefix(1);
  while (!cell.empty() && is_space(cell.back())) cell.remove_suffix(1);
  std::string cleaned;
  cleaned.reserve(cell.size());
  for (char c : cell)
    if (c != ',') cleaned.push_back(c);
  if (cleaned.empty()) return std::nullopt;
  return kg::Decimal::try_parse(cleaned);
}

}  // namespace dc::ingest
