#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dc::kg {

// 64-bit FNV-1a as 16 hex digits. Stable across builds and platforms; used
// to derive dcids for generated nodes.
inline std::string stable_hash_hex(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kDigits[h & 15];
  return out;
}

}  // namespace dc::kg
