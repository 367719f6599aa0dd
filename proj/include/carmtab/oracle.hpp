#pragma once

// Brute-force ground truth. Deliberately self-contained: nothing here calls
// into the engine's sieves, factorization or primality code.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "carmtab/korselt.hpp"

namespace carmtab::oracle {

inline constexpr std::uint64_t kMaxLimit = 1000000000;

struct OracleResult {
  std::uint64_t bound = 0;
  std::vector<CarmichaelRecord> records;  // ascending by n
};

namespace detail {

inline std::vector<std::uint32_t> primes_upto(std::uint64_t n) {
  std::vector<char> mark(n + 1, 1);
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (!mark[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= n; j += i) mark[j] = 0;
  }
  return out;
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  unsigned __int128 r = 1 % m, b = a % m;
  for (; e; e >>= 1) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
  }
  return static_cast<std::uint64_t>(r);
}

inline bool prime_by_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

}  // namespace detail

/// All Carmichael numbers below `limit`: odd, squarefree, composite and
/// (p-1) | (n-1) for every prime p | n, tested inside a segmented sieve.
inline OracleResult brute_force_tabulate(std::uint64_t limit) {
  if (limit > kMaxLimit) throw std::invalid_argument("oracle limit above 10^9 refused");
  OracleResult result;
  result.bound = limit;
  if (limit < 4) return result;
  std::uint64_t root = 1;
  while ((root + 1) * (root + 1) < limit) ++root;
  const auto primes = detail::primes_upto(root);

  constexpr std::uint64_t kSegment = 1 << 20;
  std::vector<std::uint64_t> rest(kSegment);
  std::vector<std::uint8_t> ok(kSegment), nfactors(kSegment);
  for (std::uint64_t lo = 0; lo < limit; lo += kSegment) {
    const std::uint64_t hi = std::min(limit, lo + kSegment);
    for (std::uint64_t n = lo; n < hi; ++n) {
      rest[n - lo] = n;
      ok[n - lo] = (n & 1) && n > 1;
      nfactors[n - lo] = 0;
    }
    for (std::uint32_t p : primes) {
      if (p == 2) continue;
      for (std::uint64_t n = (lo + p - 1) / p * p; n < hi; n += p) {
        const std::uint64_t i = n - lo;
        if (!ok[i]) continue;
        rest[i] /= p;
        ++nfactors[i];
        if (rest[i] % p == 0 || (n - 1) % (p - 1) != 0) ok[i] = 0;
      }
    }
    for (std::uint64_t n = lo; n < hi; ++n) {
      const std::uint64_t i = n - lo;
      if (!ok[i]) continue;
      std::uint64_t k = nfactors[i];
      if (rest[i] > 1) {
        if ((n - 1) % (rest[i] - 1) != 0) continue;
        ++k;
      }
      if (k < 2) continue;
      CarmichaelRecord rec;
      rec.n = BigNatural(static_cast<unsigned long>(n));
      std::uint64_t m = n;
      for (std::uint64_t f = 3; f * f <= m; f += 2) {
        if (m % f == 0) {
          rec.primes.emplace_back(static_cast<unsigned long>(f));
          m /= f;
        }
      }
      if (m > 1) rec.primes.emplace_back(static_cast<unsigned long>(m));
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

/// Divisors t of N with t = R (mod S) and t <= limit, by a full divisor scan.
inline std::vector<std::uint64_t> brute_force_divisors_in_class(std::uint64_t N, std::uint64_t R, std::uint64_t S,
                                                                std::uint64_t limit) {
  if (N == 0 || S == 0) throw std::invalid_argument("N and S must be positive");
  std::vector<std::uint64_t> out;
  for (std::uint64_t t = 1; t * t <= N; ++t) {
    if (N % t != 0) continue;
    for (std::uint64_t v : {t, N / t}) {
      if (v <= limit && v % S == R % S) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// a^n = a (mod n) for every 0 <= a < n. Requires composite n.
inline bool fermat_all_bases(std::uint64_t n) {
  if (n < 4 || detail::prime_by_trial(n)) throw std::invalid_argument("fermat_all_bases needs a composite n");
  for (std::uint64_t a = 2; a < n; ++a)
    if (detail::powmod(a, n, n) != a) return false;
  return true;
}

}  // namespace carmtab::oracle
