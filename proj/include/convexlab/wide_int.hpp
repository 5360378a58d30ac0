#pragma once

// Overflow-checked 128-bit unsigned accumulation for exact energies.

#include <algorithm>
#include <cstdint>
#include <string>

#include "convexlab/error.hpp"

namespace convexlab {

using Wide = unsigned __int128;

inline Wide checked_add(Wide a, Wide b) {
  Wide out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(Errc::overflow, "128-bit accumulator overflow in addition");
  }
  return out;
}

inline Wide checked_mul(Wide a, Wide b) {
  Wide out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(Errc::overflow, "128-bit accumulator overflow in multiplication");
  }
  return out;
}

inline Wide checked_pow(Wide base, unsigned exponent) {
  Wide out = 1;
  for (unsigned i = 0; i < exponent; ++i) out = checked_mul(out, base);
  return out;
}

inline std::uint64_t checked_add_u64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(Errc::overflow, "multiplicity exceeds 64-bit counter");
  }
  return out;
}

inline std::uint64_t checked_mul_u64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(Errc::overflow, "multiplicity exceeds 64-bit counter");
  }
  return out;
}

inline std::string to_string(Wide value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

inline Wide parse_wide(const std::string& text) {
  if (text.empty()) throw Error(Errc::config, "empty integer literal");
  Wide value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw Error(Errc::config, "bad integer literal '" + text + "'");
    value = checked_add(checked_mul(value, 10), static_cast<Wide>(c - '0'));
  }
  return value;
}

inline double to_double(Wide value) { return static_cast<double>(value); }

}  // namespace convexlab
