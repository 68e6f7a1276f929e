#include "dc/kg/decimal.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include "dc/error.hpp"

namespace dc::kg {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string render(bool negative, std::string digits, long exponent) {
  // digits: non-empty, no leading or trailing zeros (or exactly "0").
  if (digits == "0") return "0";
  const long n = static_cast<long>(digits.size());
  std::string out = negative ? "-" : "";
  if (exponent >= 0 && exponent < 6) {
    out += digits;
    out.append(static_cast<std::size_t>(exponent), '0');
    return out;
  }
  const long adjusted = exponent + n - 1;
  if (exponent < 0 && adjusted >= -6) {
    const long int_len = n + exponent;
    if (int_len > 0) {
      out += digits.substr(0, static_cast<std::size_t>(int_len));
      out += '.';
      out += digits.substr(static_cast<std::size_t>(int_len));
    } else {
      out += "0.";
      out.append(static_cast<std::size_t>(-int_len), '0');
      out += digits;
    }
    return out;
  }
  out += digits[0];
  if (n > 1) {
    out += '.';
    out += digits.substr(1);
  }
  out += 'e';
  out += std::to_string(adjusted);
  return out;
}

struct Parts {
  bool negative = false;
  std::string digits;  // most significant first
  long exponent = 0;
};

// Splits a canonical string back into sign, coefficient and exponent.
Parts split(const std::string& text) {
  Parts p;
  std::string_view s = text;
  if (s.front() == '-') {
    p.negative = true;
    s.remove_prefix(1);
  }
  if (auto e = s.find('e'); e != std::string_view::npos) {
    p.exponent = std::stol(std::string(s.substr(e + 1)));
    s = s.substr(0, e);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    p.exponent -= static_cast<long>(s.size() - dot - 1);
    p.digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
  } else {
    p.digits = std::string(s);
  }
  return p;
}

}  // namespace

Decimal operator*(const Decimal& a, const Decimal& b) {
  if (a.text_ == "0" || b.text_ == "0") return Decimal("0");
  const Parts x = split(a.text_);
  const Parts y = split(b.text_);
  std::vector<int> acc(x.digits.size() + y.digits.size(), 0);
  for (std::size_t i = x.digits.size(); i-- > 0;) {
    for (std::size_t j = y.digits.size(); j-- > 0;) {
      acc[i + j + 1] += (x.digits[i] - '0') * (y.digits[j] - '0');
    }
  }
  for (std::size_t k = acc.size(); k-- > 1;) {
    acc[k - 1] += acc[k] / 10;
    acc[k] %= 10;
  }
  std::string digits;
  for (int d : acc) digits += static_cast<char>('0' + d);
  std::string text = (x.negative != y.negative ? "-" : "") + digits + "e" +
                     std::to_string(x.exponent + y.exponent);
  return Decimal::parse(text);
}

std::optional<Decimal> Decimal::try_parse(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  std::size_t int_digits = 0;
  while (i < text.size() && is_digit(text[i])) {
    digits += text[i++];
    ++int_digits;
  }
  long frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && is_digit(text[i])) {
      digits += text[i++];
      ++frac_digits;
    }
  }
  if (digits.empty()) return std::nullopt;
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    const std::size_t start = i;
    while (i < text.size() && is_digit(text[i])) {
      if (i - start >= 6) return std::nullopt;
      exponent = exponent * 10 + (text[i] - '0');
      ++i;
    }
    if (i == start) return std::nullopt;
    if (exp_negative) exponent = -exponent;
  }
  if (i != text.size()) return std::nullopt;

  exponent -= frac_digits;
  const auto first = digits.find_first_not_of('0');
  if (first == std::string::npos) return Decimal("0");
  digits.erase(0, first);
  const auto last = digits.find_last_not_of('0');
  exponent += static_cast<long>(digits.size() - last - 1);
  digits.erase(last + 1);
  return Decimal(render(negative, std::move(digits), exponent));
}

Decimal Decimal::parse(std::string_view text) {
  auto parsed = try_parse(text);
  if (!parsed) {
    throw Error(ErrorCode::kMalformedValue,
                "malformed decimal '" + std::string(text) + "'");
  }
  return *parsed;
}

Decimal Decimal::from_double(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kMalformedValue, "non-finite number");
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return parse(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

Decimal Decimal::from_int(std::int64_t value) {
  return parse(std::to_string(value));
}

double Decimal::to_double() const {
  double out = 0;
  std::from_chars(text_.data(), text_.data() + text_.size(), out);
  return out;
}

std::optional<std::int64_t> Decimal::to_int64() const {
  if (text_.find_first_of(".e") != std::string::npos) return std::nullopt;
  std::int64_t out = 0;
  auto [ptr, ec] =
      std::from_chars(text_.data(), text_.data() + text_.size(), out);
  if (ec != std::errc() || ptr != text_.data() + text_.size()) {
    return std::nullopt;
  }
  return out;
}

std::partial_ordering Decimal::numeric_compare(const Decimal& other) const {
  if (*this == other) return std::partial_ordering::equivalent;
  return to_double() <=> other.to_double();
}

}  // namespace dc::kg
