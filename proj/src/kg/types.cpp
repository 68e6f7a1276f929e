#include "dc/kg/types.hpp"

#include <charconv>

#include "dc/error.hpp"

namespace dc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDcid: return "MalformedDcid";
    case ErrorCode::kMalformedValue: return "MalformedValue";
    case ErrorCode::kUnknownProvenance: return "UnknownProvenance";
    case ErrorCode::kProvenanceConflict: return "ProvenanceConflict";
    case ErrorCode::kNotAStatVar: return "NotAStatVar";
    case ErrorCode::kMissingRequiredProperty: return "MissingRequiredProperty";
    case ErrorCode::kInvalidConstraintProperty: return "InvalidConstraintProperty";
    case ErrorCode::kInvalidDescription: return "InvalidDescription";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kTemplateInvalid: return "TemplateInvalid";
    case ErrorCode::kCsvMalformed: return "CsvMalformed";
    case ErrorCode::kEncoding: return "EncodingError";
    case ErrorCode::kDecode: return "DecodeError";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kStorage: return "StorageError";
    case ErrorCode::kTransport: return "TransportError";
    case ErrorCode::kBadRequest: return "BadRequest";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kUnauthorized: return "Unauthorized";
    case ErrorCode::kForbidden: return "Forbidden";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace dc

namespace dc::kg {
namespace {

bool dcid_head(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '_';
}

bool dcid_tail(char c) {
  return dcid_head(c) || c == '/' || c == '.' || c == '-' || c == ':' || c == '+';
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kDays[m - 1];
}

std::optional<int> fixed_int(std::string_view s, std::size_t width) {
  if (s.size() != width) return std::nullopt;
  int out = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  return out;
}

std::string pad(int v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

}  // namespace

Dcid::Dcid(std::string value) : value_(std::move(value)) {
  if (!is_valid(value_)) {
    throw Error(ErrorCode::kMalformedDcid, "malformed dcid '" + value_ + "'");
  }
}

bool Dcid::is_valid(std::string_view text) {
  if (text.empty() || !dcid_head(text.front())) return false;
  for (char c : text.substr(1)) {
    if (!dcid_tail(c)) return false;
  }
  return true;
}

std::optional<PartialDate> PartialDate::try_parse(std::string_view text) {
  PartialDate d;
  auto year = fixed_int(text.substr(0, 4), 4);
  if (!year) return std::nullopt;
  d.year = *year;
  if (text.size() == 4) return d;
  if (text.size() < 7 || text[4] != '-') return std::nullopt;
  auto month = fixed_int(text.substr(5, 2), 2);
  if (!month || *month < 1 || *month > 12) return std::nullopt;
  d.month = *month;
  if (text.size() == 7) return d;
  if (text.size() != 10 || text[7] != '-') return std::nullopt;
  auto day = fixed_int(text.substr(8, 2), 2);
  if (!day || *day < 1 || *day > days_in_month(d.year, *month)) return std::nullopt;
  d.day = *day;
  return d;
}

PartialDate PartialDate::parse(std::string_view text) {
  auto d = try_parse(text);
  if (!d) {
    throw Error(ErrorCode::kMalformedValue, "malformed date '" + std::string(text) + "'");
  }
  return *d;
}

std::string PartialDate::str() const {
  std::string s = pad(year, 4);
  if (month) s += "-" + pad(*month, 2);
  if (day) s += "-" + pad(*day, 2);
  return s;
}

PartialDate PartialDate::next() const {
  PartialDate n = *this;
  if (!month) {
    ++n.year;
  } else if (!day) {
    if (++*n.month > 12) {
      n.month = 1;
      ++n.year;
    }
  } else if (++*n.day > days_in_month(n.year, *n.month)) {
    n.day = 1;
    if (++*n.month > 12) {
      n.month = 1;
      ++n.year;
    }
  }
  return n;
}

PartialDate PartialDate::first_day() const {
  return PartialDate{year, month.value_or(1), day.value_or(1)};
}

PartialDate PartialDate::last_day() const {
  const int m = month.value_or(12);
  return PartialDate{year, m, day.value_or(days_in_month(year, m))};
}

std::strong_ordering PartialDate::operator<=>(const PartialDate& other) const {
  if (auto c = year <=> other.year; c != 0) return c;
  // An absent component sorts before any present one, like a string prefix.
  if (auto c = month.value_or(0) <=> other.month.value_or(0); c != 0) return c;
  return day.value_or(0) <=> other.day.value_or(0);
}

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::kRef: return "ref";
    case ValueKind::kText: return "text";
    case ValueKind::kNumber: return "number";
    case ValueKind::kDate: return "date";
    case ValueKind::kQuantity: return "quantity";
    case ValueKind::kQuantityRange: return "range";
    case ValueKind::kLatLng: return "latlng";
  }
  return "?";
}

NodeValue::NodeValue(Variant v) : value_(std::move(v)) {
  if (auto* r = std::get_if<QuantityRange>(&value_)) {
    if (!r->low && !r->high) {
      throw Error(ErrorCode::kMalformedValue, "quantity range with both bounds open");
    }
    if (r->low && r->high && r->low->numeric_compare(*r->high) > 0) {
      throw Error(ErrorCode::kMalformedValue, "quantity range low > high");
    }
  } else if (auto* p = std::get_if<LatLng>(&value_)) {
    const double lat = p->latitude.to_double();
    const double lng = p->longitude.to_double();
    if (lat < -90 || lat > 90 || lng < -180 || lng > 180) {
      throw Error(ErrorCode::kMalformedValue, "latitude/longitude out of bounds");
    }
  } else if (auto* d = std::get_if<Dcid>(&value_)) {
    if (d->empty()) throw Error(ErrorCode::kMalformedDcid, "empty dcid");
  }
}

std::string NodeValue::key() const {
  struct Visitor {
    std::string operator()(const Dcid& d) const { return "ref:" + d.str(); }
    std::string operator()(const Text& t) const { return "text:" + t.value; }
    std::string operator()(const Decimal& n) const { return "number:" + n.str(); }
    std::string operator()(const PartialDate& d) const { return "date:" + d.str(); }
    std::string operator()(const Quantity& q) const {
      return "quantity:" + q.value.str() + " " + q.unit.str();
    }
    std::string operator()(const QuantityRange& r) const {
      return "range:" + (r.low ? r.low->str() : "*") + " " + (r.high ? r.high->str() : "*") +
             " " + r.unit.str();
    }
    std::string operator()(const LatLng& p) const {
      return "latlng:" + p.latitude.str() + " " + p.longitude.str();
    }
  };
  return std::visit(Visitor{}, value_);
}

NodeValue NodeValue::from_key(std::string_view key) {
  const auto colon = key.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::kMalformedValue, "untagged value '" + std::string(key) + "'");
  }
  const std::string_view tag = key.substr(0, colon);
  const std::string_view body = key.substr(colon + 1);
  auto split = [&](std::size_t expected) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
      const auto sp = body.find(' ', start);
      parts.push_back(body.substr(start, sp - start));
      if (sp == std::string_view::npos) break;
      start = sp + 1;
    }
    if (parts.size() != expected) {
      throw Error(ErrorCode::kMalformedValue, "malformed value '" + std::string(key) + "'");
    }
    return parts;
  };
  if (tag == "ref") return NodeValue(Dcid(std::string(body)));
  if (tag == "text") return NodeValue(Text{std::string(body)});
  if (tag == "number") return NodeValue(Decimal::parse(body));
  if (tag == "date") return NodeValue(PartialDate::parse(body));
  if (tag == "quantity") {
    auto p = split(2);
    return NodeValue(Quantity{Decimal::parse(p[0]), Dcid(std::string(p[1]))});
  }
  if (tag == "range") {
    auto p = split(3);
    QuantityRange r;
    if (p[0] != "*") r.low = Decimal::parse(p[0]);
    if (p[1] != "*") r.high = Decimal::parse(p[1]);
    r.unit = Dcid(std::string(p[2]));
    return NodeValue(std::move(r));
  }
  if (tag == "latlng") {
    auto p = split(2);
    return NodeValue(LatLng{Decimal::parse(p[0]), Decimal::parse(p[1])});
  }
  throw Error(ErrorCode::kMalformedValue, "unknown value tag '" + std::string(tag) + "'");
}

bool triple_less(const Triple& a, const Triple& b) {
  if (a.subject != b.subject) return a.subject < b.subject;
  if (a.predicate != b.predicate) return a.predicate < b.predicate;
  if (auto ka = a.object.key(), kb = b.object.key(); ka != kb) return ka < kb;
  return a.provenance < b.provenance;
}

std::string_view to_string(Direction d) { return d == Direction::kOut ? "out" : "in"; }

std::optional<Direction> parse_direction(std::string_view text) {
  if (text == "out") return Direction::kOut;
  if (text == "in") return Direction::kIn;
  return std::nullopt;
}

}  // namespace dc::kg
