#pragma once

// Factorizations and the multiplicative functions built on them.

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "carmtab/uint128.hpp"

namespace carmtab {

struct PrimePower {
  u64 prime = 0;
  u32 exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A machine-word natural together with its prime factorization. Fixed
/// capacity: no value below 2^64 has more than 15 distinct prime factors.
class Factorization {
 public:
  static constexpr std::size_t kCapacity = 15;

  Factorization() = default;

  /// Appends p^e. Primes must be pushed in strictly increasing order.
  void push(u64 prime, u32 exponent = 1) {
    if (exponent == 0) return;
    if (count_ == kCapacity) throw std::length_error("too many prime factors");
    if (count_ != 0 && factors_[count_ - 1].prime >= prime)
      throw std::invalid_argument("primes must be pushed in increasing order");
    u128 v = value_;
    for (u32 i = 0; i < exponent; ++i) {
      v *= prime;
      if (v > ~u64{0}) throw std::overflow_error("factorization value exceeds 64 bits");
    }
    value_ = static_cast<u64>(v);
    factors_[count_++] = {prime, exponent};
  }

  u64 value() const { return value_; }
  std::span<const PrimePower> factors() const { return {factors_.data(), count_}; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  const PrimePower& operator[](std::size_t i) const { return factors_[i]; }

  u64 largest_prime() const { return count_ == 0 ? 1 : factors_[count_ - 1].prime; }
  u64 smallest_prime() const { return count_ == 0 ? 1 : factors_[0].prime; }

  bool squarefree() const {
    for (std::size_t i = 0; i < count_; ++i)
      if (factors_[i].exponent > 1) return false;
    return true;
  }

  u32 exponent_of(u64 p) const {
    for (std::size_t i = 0; i < count_; ++i)
      if (factors_[i].prime == p) return factors_[i].exponent;
    return 0;
  }

  friend bool operator==(const Factorization& a, const Factorization& b) {
    if (a.value_ != b.value_ || a.count_ != b.count_) return false;
    for (std::size_t i = 0; i < a.count_; ++i)
      if (a.factors_[i] != b.factors_[i]) return false;
    return true;
  }

 private:
  u64 value_ = 1;
  std::size_t count_ = 0;
  std::array<PrimePower, kCapacity> factors_{};
};

/// Product of two factorizations (merge of exponent vectors).
inline Factorization operator*(const Factorization& a, const Factorization& b) {
  Factorization out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].prime < b[j].prime)) {
      out.push(a[i].prime, a[i].exponent);
      ++i;
    } else if (i == a.size() || b[j].prime < a[i].prime) {
      out.push(b[j].prime, b[j].exponent);
      ++j;
    } else {
      out.push(a[i].prime, a[i].exponent + b[j].exponent);
      ++i;
      ++j;
    }
  }
  return out;
}

/// Removes one factor of 2 (the value must be even).
inline Factorization halve(const Factorization& f) {
  if (f.empty() || f[0].prime != 2) throw std::invalid_argument("halve: value is odd");
  Factorization out;
  out.push(2, f[0].exponent - 1);
  for (std::size_t i = 1; i < f.size(); ++i) out.push(f[i].prime, f[i].exponent);
  return out;
}

/// Factorization by trial division. Intended for values whose second-largest
/// prime factor is small or for values below ~2^40.
inline Factorization trial_factor(u64 n) {
  if (n == 0) throw std::invalid_argument("trial_factor(0)");
  Factorization f;
  u32 e = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++e;
  }
  f.push(2, e);
  for (u64 p = 3; p <= n / p; p += 2) {
    e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.push(p, e);
  }
  if (n > 1) f.push(n, 1);
  return f;
}

inline u64 lcm64(u64 a, u64 b) {
  const u128 l = static_cast<u128>(a / std::gcd(a, b)) * b;
  if (l > ~u64{0}) throw std::overflow_error("lcm exceeds 64 bits");
  return static_cast<u64>(l);
}

/// Carmichael's function: lcm of lambda(p^a), with lambda(2^a) = phi(2^a)/2 for a >= 3.
inline u64 carmichael_lambda(const Factorization& f) {
  u64 lambda = 1;
  for (const auto& [p, e] : f.factors()) {
    u64 part;
    if (p == 2) {
      part = e <= 2 ? (u64{1} << (e - 1)) : (u64{1} << (e - 2));
    } else {
      part = p - 1;
      for (u32 i = 1; i < e; ++i) part *= p;
    }
    lambda = lcm64(lambda, part);
  }
  return lambda;
}

inline u64 euler_phi(const Factorization& f) {
  u64 phi = 1;
  for (const auto& [p, e] : f.factors()) {
    phi *= p - 1;
    for (u32 i = 1; i < e; ++i) phi *= p;
  }
  return phi;
}

/// Number of divisors.
inline u64 tau(const Factorization& f) {
  u64 t = 1;
  for (const auto& pe : f.factors()) t *= pe.exponent + 1;
  return t;
}

/// gcd(n, phi(n)) = 1: squarefree and no prime factor divides another one minus one.
inline bool is_cyclic(const Factorization& f) {
  if (!f.squarefree()) return false;
  for (const auto& a : f.factors())
    for (const auto& b : f.factors())
      if (a.prime < b.prime && (b.prime - 1) % a.prime == 0) return false;
  return true;
}

/// x in [0, m) with a*x = 1 (mod m), or nullopt when gcd(a, m) != 1.
inline std::optional<u64> mod_inverse(u64 a, u64 m) {
  if (m == 0) throw std::invalid_argument("mod_inverse: modulus must be positive");
  if (m == 1) return 0;
  i128 old_r = a % m, r = m;
  i128 old_s = 1, s = 0;
  while (r != 0) {
    const i128 quot = old_r / r;
    i128 t = old_r - quot * r;
    old_r = r;
    r = t;
    t = old_s - quot * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) return std::nullopt;
  i128 x = old_s % static_cast<i128>(m);
  if (x < 0) x += m;
  return static_cast<u64>(x);
}

/// Ascending divisor stream over a factorization, optionally capped at a
/// limit. Heap-merge over the exponent odometer: each divisor's parent is the
/// divisor with one copy of its largest prime removed, so children are always
/// larger and the min-heap pops in increasing order. Stop pulling to abort.
class DivisorStream {
 public:
  explicit DivisorStream(const Factorization& f, std::optional<u64> limit = std::nullopt)
      : f_(f), limit_(limit.value_or(~u64{0})) {
    if (limit_ >= 1) heap_.push({1, -1, 0});
  }

  std::optional<u64> next() {
    if (heap_.empty()) return std::nullopt;
    const Node n = heap_.top();
    heap_.pop();
    const int start = n.index < 0 ? 0 : n.index;
    for (int j = start; j < static_cast<int>(f_.size()); ++j) {
      const u32 count = j == n.index ? n.count + 1 : 1;
      if (count > f_[j].exponent) continue;
      const u128 child = static_cast<u128>(n.value) * f_[j].prime;
      if (child > limit_) continue;
      heap_.push({static_cast<u64>(child), j, count});
    }
    return n.value;
  }

 private:
  struct Node {
    u64 value;
    int index;  // index of the largest prime used, -1 for 1
    u32 count;  // exponent of that prime
    bool operator>(const Node& o) const { return value > o.value; }
  };
  Factorization f_;
  u64 limit_;
  std::priority_queue<Node, std::vector<Node>, std::greater<>> heap_;
};

inline std::vector<u64> divisors_ascending(const Factorization& f, std::optional<u64> limit = std::nullopt) {
  std::vector<u64> out;
  DivisorStream s(f, limit);
  while (auto d = s.next()) out.push_back(*d);
  return out;
}

/// Unordered divisor enumeration with per-prime exponent windows and a cap.
/// `min_exp`/`max_exp` are indexed like f.factors(). Visit returns false to stop.
template <class Visit>
bool for_each_divisor(const Factorization& f, u64 limit, std::span<const u32> min_exp,
                      std::span<const u32> max_exp, Visit&& visit) {
  const std::size_t k = f.size();
  auto rec = [&](auto&& self, std::size_t i, u64 d) -> bool {
    if (i == k) return visit(d);
    const u32 lo = min_exp[i];
    const u32 hi = std::min(max_exp[i], f[i].exponent);
    if (lo > hi) return true;
    u64 cur = d;
    for (u32 e = 0; e < lo; ++e) {
      const u128 next = static_cast<u128>(cur) * f[i].prime;
      if (next > limit) return true;
      cur = static_cast<u64>(next);
    }
    for (u32 e = lo;; ++e) {
      if (!self(self, i + 1, cur)) return false;
      if (e == hi) break;
      const u128 next = static_cast<u128>(cur) * f[i].prime;
      if (next > limit) break;
      cur = static_cast<u64>(next);
    }
    return true;
  };
  return rec(rec, 0, 1);
}

inline std::string to_string(const Factorization& f) {
  std::string s;
  for (const auto& [p, e] : f.factors()) {
    if (!s.empty()) s += " * ";
    s += std::to_string(p);
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s.empty() ? "1" : s;
}

}  // namespace carmtab
