#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dc/kg/decimal.hpp"

namespace dc::kg {

// Node identifier. Opaque: nothing may be inferred from its text.
class Dcid {
 public:
  Dcid() = default;
  // Throws Error(kMalformedDcid) unless the text matches
  // [A-Za-z0-9_][A-Za-z0-9_/.\-:+]*.
  explicit Dcid(std::string value);

  static bool is_valid(std::string_view text);

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  auto operator<=>(const Dcid&) const = default;

 private:
  std::string value_;
};

// YYYY, YYYY-MM or YYYY-MM-DD. Coarser dates stand for the whole period they
// name when used as range bounds (see first_day / last_day).
struct PartialDate {
  int year = 0;
  std::optional<int> month;
  std::optional<int> day;

  // Throws Error(kMalformedValue).
  static PartialDate parse(std::string_view text);
  static std::optional<PartialDate> try_parse(std::string_view text);

  std::string str() const;
  // Same-precision successor: 2019 -> 2020, 2019-12 -> 2020-01,
  // 2019-02-28 -> 2019-03-01.
  PartialDate next() const;
  PartialDate first_day() const;
  PartialDate last_day() const;

  bool operator==(const PartialDate&) const = default;
  // Orders like the serialized string: components first, then coarser first.
  std::strong_ordering operator<=>(const PartialDate& other) const;
};

struct Text {
  std::string value;
  auto operator<=>(const Text&) const = default;
};

struct Quantity {
  Decimal value;
  Dcid unit;
  bool operator==(const Quantity&) const = default;
};

// At least one bound is closed; low <= high when both are.
struct QuantityRange {
  std::optional<Decimal> low;
  std::optional<Decimal> high;
  Dcid unit;
  bool operator==(const QuantityRange&) const = default;
};

struct LatLng {
  Decimal latitude;
  Decimal longitude;
  bool operator==(const LatLng&) const = default;
};

enum class ValueKind { kRef, kText, kNumber, kDate, kQuantity, kQuantityRange, kLatLng };

std::string_view to_string(ValueKind kind);

// Object position of a triple. The kind tag is part of the serialized key,
// so key() / from_key() round-trip losslessly.
class NodeValue {
 public:
  using Variant =
      std::variant<Dcid, Text, Decimal, PartialDate, Quantity, QuantityRange, LatLng>;

  NodeValue() : value_(Text{}) {}
  NodeValue(Variant v);  // validates range / lat-lng invariants

  static NodeValue ref(std::string dcid) { return NodeValue(Dcid(std::move(dcid))); }
  static NodeValue text(std::string s) { return NodeValue(Text{std::move(s)}); }
  static NodeValue number(std::string_view s) { return NodeValue(Decimal::parse(s)); }
  static NodeValue date(std::string_view s) { return NodeValue(PartialDate::parse(s)); }

  ValueKind kind() const { return static_cast<ValueKind>(value_.index()); }
  const Variant& get() const { return value_; }

  bool is_ref() const { return kind() == ValueKind::kRef; }
  const Dcid* as_ref() const { return std::get_if<Dcid>(&value_); }
  const Text* as_text() const { return std::get_if<Text>(&value_); }
  const Decimal* as_number() const { return std::get_if<Decimal>(&value_); }
  const PartialDate* as_date() const { return std::get_if<PartialDate>(&value_); }

  // Serialized form, e.g. "ref:country/GEO", "text:Georgia", "number:4080000",
  // "date:2019", "quantity:10 Kilogram", "range:* 5 Year", "latlng:41.7 44.8".
  std::string key() const;
  static NodeValue from_key(std::string_view key);

  bool operator==(const NodeValue& other) const { return value_ == other.value_; }

 private:
  Variant value_;
};

struct Triple {
  Dcid subject;
  Dcid predicate;
  NodeValue object;
  Dcid provenance;

  bool operator==(const Triple&) const = default;
};

// Total order used for set comparisons: (subject, predicate, object key, provenance).
bool triple_less(const Triple& a, const Triple& b);

struct Provenance {
  Dcid dcid;
  std::string source_url;
  std::string import_name;
  PartialDate import_date;

  bool operator==(const Provenance&) const = default;
};

enum class Direction { kOut, kIn };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view text);

}  // namespace dc::kg

template <>
struct std::hash<dc::kg::Dcid> {
  std::size_t operator()(const dc::kg::Dcid& d) const noexcept {
    return std::hash<std::string>{}(d.str());
  }
};
