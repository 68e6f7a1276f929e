#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dc::kg {

// Exact decimal literal kept in canonical text form.
//
// Canonical form: no leading/trailing zeros in the coefficient, "-" only for
// non-zero values, plain positional notation when the stripped exponent is
// small, scientific otherwise:
//   4080000  -> "4080000"     (coefficient 408, exponent 4)
//   1000000  -> "1e6"         (coefficient 1, exponent 6)
//   0.000001 -> "0.000001"
//   1e-7     -> "1e-7"
// Two literals denote the same number iff their canonical strings are equal.
class Decimal {
 public:
  Decimal() : text_("0") {}

  // Accepts [+-]digits[.digits][(e|E)[+-]digits]. Throws Error(kMalformedValue).
  static Decimal parse(std::string_view text);
  static std::optional<Decimal> try_parse(std::string_view text);
  // Shortest round-trip representation of a binary double.
  static Decimal from_double(double value);
  static Decimal from_int(std::int64_t value);

  const std::string& str() const noexcept { return text_; }
  double to_double() const;
  // Set when the canonical form is a plain integer that fits in int64.
  std::optional<std::int64_t> to_int64() const;

  // Exact product.
  friend Decimal operator*(const Decimal& a, const Decimal& b);

  bool operator==(const Decimal& other) const = default;
  // Numeric order.
  std::partial_ordering numeric_compare(const Decimal& other) const;

 private:
  explicit Decimal(std::string canonical) : text_(std::move(canonical)) {}
  std::string text_;
};

}  // namespace dc::kg
