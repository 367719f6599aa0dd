#pragma once

// Fixed-width helpers shared by every module: 128-bit unsigned arithmetic,
// integer square roots, modular multiplication and decimal conversion.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace carmtab {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr u128 kU128Max = ~u128{0};
inline constexpr u128 kTwoTo64 = u128{1} << 64;

inline std::string to_string(u128 v) {
  if (v == 0) return "0";
  char buf[40];
  int pos = 40;
  while (v != 0) {
    buf[--pos] = static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  return std::string(buf + pos, buf + 40);
}

/// Parses a plain decimal string. Throws std::invalid_argument on anything else
/// (including overflow past 2^128 - 1).
inline u128 parse_u128(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("not a decimal number: " + std::string(s));
    const u128 digit = static_cast<u128>(c - '0');
    if (v > (kU128Max - digit) / 10) throw std::invalid_argument("number exceeds 128 bits: " + std::string(s));
    v = v * 10 + digit;
  }
  return v;
}

inline u64 isqrt(u64 n) {
  if (n < 2) return n;
  u64 x = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (x > 0 && static_cast<u128>(x) * x > n) --x;
  while (static_cast<u128>(x + 1) * (x + 1) <= n) ++x;
  return x;
}

inline u128 isqrt(u128 n) {
  if (n <= ~u64{0}) return isqrt(static_cast<u64>(n));
  // Newton from an overestimate.
  const int bits = 128 - std::countl_zero(static_cast<u64>(n >> 64));
  u128 x = u128{1} << ((bits + 64) / 2 + 1);
  for (;;) {
    const u128 y = (x + n / x) / 2;
    if (y >= x) break;
    x = y;
  }
  while (x * x > n) --x;
  return x;
}

/// Largest x with x^k <= n, for k >= 1.
inline u128 iroot(u128 n, unsigned k) {
  if (k == 1 || n < 2) return n;
  if (k == 2) return isqrt(n);
  auto pow_le = [&](u128 x) {
    u128 acc = 1;
    for (unsigned i = 0; i < k; ++i) {
      if (acc > n / x) return false;
      acc *= x;
    }
    return acc <= n;
  };
  u128 x = static_cast<u128>(std::pow(static_cast<long double>(n), 1.0L / k));
  while (x > 0 && !pow_le(x)) --x;
  while (pow_le(x + 1)) ++x;
  return x;
}

constexpr u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

constexpr u64 powmod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Reduces a 128-bit value modulo a 64-bit modulus.
constexpr u64 mod64(u128 a, u64 m) { return static_cast<u64>(a % m); }

constexpr u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// a*b with overflow detection; returns false on overflow.
inline bool checked_mul(u128 a, u128 b, u128& out) { return !__builtin_mul_overflow(a, b, &out); }

inline u128 saturating_mul(u128 a, u128 b) {
  u128 out;
  return checked_mul(a, b, out) ? out : kU128Max;
}

}  // namespace carmtab
