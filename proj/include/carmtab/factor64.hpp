#pragma once

// Complete factorization of 64-bit integers: trial division by small primes,
// then Brent's variant of Pollard rho on what remains, under an iteration budget.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "carmtab/numtheory.hpp"
#include "carmtab/primality.hpp"

namespace carmtab {

inline constexpr u64 kDefaultRhoBudget = u64{1} << 20;

namespace detail {

// A nontrivial factor of the odd composite n, or 0 once `budget` runs out.
inline u64 brent_rho(u64 n, u64& budget) {
  for (u64 c = 1; budget > 0; ++c) {
    auto f = [&](u64 x) {
      const u128 y = static_cast<u128>(mulmod(x, x, n)) + c;
      return static_cast<u64>(y >= n ? y - n : y);
    };
    u64 y = 2, x = 2, ys = 2, g = 1, q = 1;
    constexpr u64 kBatch = 128;
    for (u64 len = 1; g == 1; len <<= 1) {
      x = y;
      for (u64 i = 0; i < len; ++i) y = f(y);
      for (u64 k = 0; k < len && g == 1; k += kBatch) {
        ys = y;
        const u64 steps = std::min(kBatch, len - k);
        for (u64 i = 0; i < steps; ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        budget = budget > steps ? budget - steps : 0;
        if (budget == 0 && g == 1) return 0;
      }
    }
    if (g == n) {
      // The batch overshot; retrace one step at a time.
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
  return 0;
}

}  // namespace detail

/// Factors n >= 1, or returns nullopt when rho exhausts `rho_budget` iterations.
inline std::optional<Factorization> factor_u64(u64 n, u64 rho_budget = kDefaultRhoBudget) {
  if (n == 0) throw std::invalid_argument("factor_u64(0)");
  std::map<u64, u32> primes;
  for (u64 p = 2; p < 1024 && p * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      n /= p;
      ++primes[p];
    }
  }
  std::vector<u64> pending;
  if (n > 1) pending.push_back(n);
  u64 budget = rho_budget;
  while (!pending.empty()) {
    const u64 m = pending.back();
    pending.pop_back();
    if (is_prime_u64(m)) {
      ++primes[m];
      continue;
    }
    const u64 s = isqrt(m);
    if (s * s == m) {
      pending.push_back(s);
      pending.push_back(s);
      continue;
    }
    const u64 d = detail::brent_rho(m, budget);
    if (d == 0) return std::nullopt;
    pending.push_back(d);
    pending.push_back(m / d);
  }
  Factorization f;
  for (const auto& [p, e] : primes) f.push(p, e);
  return f;
}

}  // namespace carmtab
