#pragma once

// Arbitrary-precision naturals (GMP) and the tabulation bound B.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "carmtab/uint128.hpp"

namespace carmtab {

using BigNatural = mpz_class;

inline BigNatural to_big(u128 v) {
  BigNatural hi{static_cast<unsigned long>(static_cast<u64>(v >> 64))};
  BigNatural lo{static_cast<unsigned long>(static_cast<u64>(v))};
  return (hi << 64) + lo;
}

inline bool fits_u128(const BigNatural& v) { return sgn(v) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 128; }

inline u128 to_u128(const BigNatural& v) {
  if (!fits_u128(v)) throw std::out_of_range("value does not fit in 128 bits: " + v.get_str());
  const BigNatural hi = v >> 64;
  const BigNatural lo = v - (hi << 64);
  return (static_cast<u128>(hi.get_ui()) << 64) | lo.get_ui();
}

/// Parses "12345", "10^12" or "1e12". Negative values are rejected.
inline BigNatural parse_natural(std::string_view text) {
  std::string s(text);
  auto pos = s.find('^');
  const bool power = pos != std::string::npos;
  if (!power) pos = s.find_first_of("eE");
  try {
    if (pos != std::string::npos) {
      const BigNatural base(s.substr(0, pos), 10);
      const unsigned long exp = std::stoul(s.substr(pos + 1));
      if (sgn(base) < 0) throw std::invalid_argument("negative");
      BigNatural out;
      if (power) {
        mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
      } else {
        mpz_ui_pow_ui(out.get_mpz_t(), 10, exp);
        out *= base;
      }
      return out;
    }
    BigNatural out(s, 10);
    if (sgn(out) < 0) throw std::invalid_argument("negative");
    return out;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a natural number: " + s);
  }
}

/// Ceiling of the integer cube root.
inline BigNatural ceil_cbrt(const BigNatural& n) {
  BigNatural r;
  mpz_root(r.get_mpz_t(), n.get_mpz_t(), 3);
  if (r * r * r < n) ++r;
  return r;
}

/// The exclusive upper bound n < B on tabulated numbers, or no bound.
class Bound {
 public:
  Bound() = default;
  explicit Bound(BigNatural b) : value_(std::move(b)) {
    if (sgn(*value_) <= 0) throw std::invalid_argument("bound must be positive");
    fast_ = fits_u128(*value_) ? to_u128(*value_) : kU128Max;
    wide_ = !fits_u128(*value_);
  }
  explicit Bound(u128 b) : Bound(to_big(b)) {}

  static Bound unbounded() { return Bound{}; }

  bool bounded() const { return value_.has_value(); }
  const BigNatural& value() const { return *value_; }

  /// B as a 128-bit value, saturated at 2^128 - 1.
  u128 saturated() const { return bounded() ? fast_ : kU128Max; }

  /// True when a < B (always true when unbounded).
  bool admits(u128 a) const { return !bounded() || wide_ || a < fast_; }

  /// True when a*b < B.
  bool admits(u128 a, u128 b) const {
    if (!bounded()) return true;
    u128 prod;
    if (checked_mul(a, b, prod)) return wide_ || prod < fast_;
    if (!wide_) return false;
    return to_big(a) * to_big(b) < *value_;
  }

  /// True when a*b*c < B.
  bool admits(u128 a, u128 b, u128 c) const {
    if (!bounded()) return true;
    u128 ab;
    if (checked_mul(a, b, ab)) return admits(ab, c);
    if (!wide_) return false;
    return to_big(a) * to_big(b) * to_big(c) < *value_;
  }

  bool admits(const BigNatural& n) const { return !bounded() || n < *value_; }

 private:
  std::optional<BigNatural> value_;
  u128 fast_ = kU128Max;
  bool wide_ = false;
};

}  // namespace carmtab
