#include "dc/ingest/dcnf.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>

#include "dc/error.hpp"
#include "dc/kg/hash.hpp"

namespace dc::ingest {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<std::string> unquote(std::string_view token) {
  if (token.size() < 2 || token.front() != '"' || token.back() != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = 1; i + 1 < token.size(); ++i) {
    char c = token[i];
    if (c == '"') return std::nullopt;
    if (c == '\\') {
      if (i + 2 >= token.size()) return std::nullopt;
      switch (token[++i]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: return std::nullopt;
      }
    } else {
      out += c;
    }
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::optional<kg::NodeValue> parse_composite(std::string_view body) {
  const auto parts = split_ws(body);
  auto number = [](std::string_view t) { return kg::Decimal::try_parse(t); };
  if (parts.size() == 2) {
    auto first = number(parts[0]);
    if (!first) return std::nullopt;
    if (auto second = number(parts[1])) {
      return kg::NodeValue(kg::LatLng{*first, *second});
    }
    if (!kg::Dcid::is_valid(parts[1])) return std::nullopt;
    return kg::NodeValue(kg::Quantity{*first, kg::Dcid(std::string(parts[1]))});
  }
  if (parts.size() == 3) {
    kg::QuantityRange r;
    if (parts[0] != "-") {
      r.low = number(parts[0]);
      if (!r.low) return std::nullopt;
    }
    if (parts[1] != "-") {
      r.high = number(parts[1]);
      if (!r.high) return std::nullopt;
    }
    if (!kg::Dcid::is_valid(parts[2])) return std::nullopt;
    r.unit = kg::Dcid(std::string(parts[2]));
    return kg::NodeValue(std::move(r));
  }
  return std::nullopt;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

struct ProvenanceDraft {
  kg::Dcid dcid;
  std::size_t line = 0;
  std::string source_url;
  std::string import_name;
  std::optional<kg::PartialDate> import_date;
  bool declares = false;
};

struct PendingTriple {
  kg::Dcid predicate;
  std::optional<kg::NodeValue> value;
  std::string alias_ref;
  std::size_t line;
};

struct Block {
  std::size_t first_line = 0;
  std::optional<kg::Dcid> dcid;
  std::string alias;
  std::vector<PendingTriple> props;
  std::optional<kg::Dcid> provenance;
  std::string content;  // raw lines, for alias-derived dcids
  std::optional<ParseError> error;
};

}  // namespace

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > text.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

std::optional<kg::NodeValue> parse_value_token(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  try {
    if (token.front() == '"') {
      auto s = unquote(token);
      if (!s) return std::nullopt;
      return kg::NodeValue(kg::Text{std::move(*s)});
    }
    if (token.starts_with("dcid:")) {
      auto id = trim(token.substr(5));
      if (!kg::Dcid::is_valid(id)) return std::nullopt;
      return kg::NodeValue(kg::Dcid(std::string(id)));
    }
    if (token.starts_with("number:")) {
      auto n = kg::Decimal::try_parse(token.substr(7));
      if (!n) return std::nullopt;
      return kg::NodeValue(*n);
    }
    if (token.front() == '[') {
      if (token.back() != ']') return std::nullopt;
      return parse_composite(token.substr(1, token.size() - 2));
    }
    if (auto d = kg::PartialDate::try_parse(token)) return kg::NodeValue(*d);
    if (auto n = kg::Decimal::try_parse(token)) return kg::NodeValue(*n);
  } catch (const Error&) {
    // Composite invariants (range order, lat/lng bounds) failed.
  }
  return std::nullopt;
}

ParsedNodeFile parse_node_file(std::string_view text, const NodeFileOptions& options) {
  if (!is_valid_utf8(text)) {
    throw Error(ErrorCode::kEncoding, "node file is not valid UTF-8");
  }
  ParsedNodeFile out;

  // Split into paragraphs, dropping comments.
  std::vector<std::vector<Line>> paragraphs;
  {
    std::vector<Line> current;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      const std::string_view raw =
          text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++number;
      const std::string_view line = trim(raw);
      if (line.empty()) {
        if (!current.empty()) paragraphs.push_back(std::move(current));
        current.clear();
      } else if (line.front() != '#') {
        current.push_back({number, line});
      }
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    if (!current.empty()) paragraphs.push_back(std::move(current));
  }

  std::optional<kg::Dcid> active = options.default_provenance;
  std::vector<ProvenanceDraft> drafts;
  std::vector<Block> blocks;

  for (const auto& para : paragraphs) {
    const bool directive = para.front().text.front() == '@';
    if (directive) {
      for (const Line& line : para) {
        auto fail = [&](std::string reason) {
          out.errors.push_back({line.number, std::move(reason)});
        };
        if (line.text.front() != '@') {
          fail("property line inside a directive paragraph");
          continue;
        }
        const auto sp = line.text.find_first_of(" \t");
        const std::string_view name = line.text.substr(1, sp == std::string_view::npos ? sp : sp - 1);
        const std::string_view arg =
            sp == std::string_view::npos ? std::string_view() : trim(line.text.substr(sp));
        if (name == "provenance") {
          if (!kg::Dcid::is_valid(arg)) {
            fail("malformed provenance dcid '" + std::string(arg) + "'");
            active.reset();
            continue;
          }
          active = kg::Dcid(std::string(arg));
          drafts.push_back({*active, line.number, "", "", std::nullopt, false});
          continue;
        }
        if (drafts.empty() || !active || drafts.back().dcid != *active) {
          fail("@" + std::string(name) + " without a preceding @provenance");
          continue;
        }
        ProvenanceDraft& d = drafts.back();
        d.declares = true;
        if (name == "source") {
          d.source_url = std::string(arg);
        } else if (name == "importName") {
          d.import_name = std::string(arg);
        } else if (name == "importDate") {
          d.import_date = kg::PartialDate::try_parse(arg);
          if (!d.import_date) fail("malformed @importDate '" + std::string(arg) + "'");
        } else {
          fail("unknown directive @" + std::string(name));
        }
      }
      continue;
    }

    Block b;
    b.first_line = para.front().number;
    b.provenance = active;
    auto fail = [&](std::size_t line, std::string reason) {
      if (!b.error) b.error = ParseError{line, std::move(reason)};
    };
    for (const Line& line : para) {
      b.content += line.text;
      b.content += '\n';
      if (line.text.front() == '@') {
        fail(line.number, "directive inside a node block");
        continue;
      }
      const auto colon = line.text.find(':');
      if (colon == std::string_view::npos) {
        fail(line.number, "expected 'property: value'");
        continue;
      }
      const std::string_view key = trim(line.text.substr(0, colon));
      const std::string_view value = trim(line.text.substr(colon + 1));
      if (key == "dcid") {
        if (b.dcid || !b.alias.empty()) {
          fail(line.number, "second dcid/alias line in block");
        } else if (!kg::Dcid::is_valid(value)) {
          fail(line.number, "malformed dcid '" + std::string(value) + "'");
        } else {
          b.dcid = kg::Dcid(std::string(value));
        }
        continue;
      }
      if (key == "alias") {
        if (b.dcid || !b.alias.empty()) {
          fail(line.number, "second dcid/alias line in block");
        } else if (!kg::Dcid::is_valid(value)) {
          fail(line.number, "malformed alias '" + std::string(value) + "'");
        } else {
          b.alias = std::string(value);
        }
        continue;
      }
      if (!kg::Dcid::is_valid(key)) {
        fail(line.number, "malformed property '" + std::string(key) + "'");
        continue;
      }
      PendingTriple p{kg::Dcid(std::string(key)), std::nullopt, "", line.number};
      if (value.starts_with("l:")) {
        p.alias_ref = std::string(trim(value.substr(2)));
      } else {
        p.value = parse_value_token(value);
        if (!p.value) {
          fail(line.number, "unrecognized value '" + std::string(value) + "'");
          continue;
        }
      }
      b.props.push_back(std::move(p));
    }
    if (!b.dcid && b.alias.empty()) fail(b.first_line, "block has no dcid or alias line");
    if (!b.provenance) fail(b.first_line, "no provenance in effect for block");
    blocks.push_back(std::move(b));
  }

  for (const ProvenanceDraft& d : drafts) {
    if (!d.declares) continue;
    if (!d.import_date) {
      out.errors.push_back({d.line, "provenance '" + d.dcid.str() + "' lacks @importDate"});
      continue;
    }
    out.provenances.push_back({d.dcid, d.source_url, d.import_name, *d.import_date});
  }

  std::map<std::string, kg::Dcid, std::less<>> aliases;
  for (Block& b : blocks) {
    if (b.error || b.alias.empty()) continue;
    kg::Dcid id("dc/alias/" + kg::stable_hash_hex(b.alias + "\n" + b.content));
    if (!aliases.emplace(b.alias, id).second) {
      b.error = ParseError{b.first_line, "duplicate alias '" + b.alias + "'"};
      continue;
    }
    b.dcid = id;
  }

  for (Block& b : blocks) {
    std::vector<kg::Triple> triples;
    for (const PendingTriple& p : b.props) {
      if (b.error) break;
      kg::NodeValue value;
      if (p.value) {
        value = *p.value;
      } else if (auto it = aliases.find(p.alias_ref); it != aliases.end()) {
        value = kg::NodeValue(it->second);
      } else {
        b.error = ParseError{p.line, "unknown alias '" + p.alias_ref + "'"};
        break;
      }
      triples.push_back({*b.dcid, p.predicate, std::move(value), *b.provenance});
    }
    if (b.error) {
      out.errors.push_back(*b.error);
      continue;
    }
    std::move(triples.begin(), triples.end(), std::back_inserter(out.triples));
  }
  std::stable_sort(out.errors.begin(), out.errors.end(),
                   [](const ParseError& a, const ParseError& b) { return a.line < b.line; });
  return out;
}

}  // namespace dc::ingest
