#pragma once

// Korselt verification. Candidates are checked cheapest stage first; the
// primality of q and r is only tested once every divisibility condition holds.

#include <algorithm>
#include <initializer_list>
#include <numeric>
#include <span>
#include <variant>
#include <vector>

#include "carmtab/bignum.hpp"
#include "carmtab/preproduct.hpp"
#include "carmtab/primality.hpp"

namespace carmtab {

struct CarmichaelRecord {
  BigNatural n;
  std::vector<BigNatural> primes;  // ascending

  std::size_t d() const { return primes.size(); }

  friend bool operator==(const CarmichaelRecord& a, const CarmichaelRecord& b) {
    return a.n == b.n && a.primes == b.primes;
  }
  friend bool operator<(const CarmichaelRecord& a, const CarmichaelRecord& b) { return a.n < b.n; }
};

/// Korselt's criterion on an explicit list of prime factors.
inline bool korselt_check(std::span<const BigNatural> primes) {
  if (primes.size() < 3) return false;
  std::vector<BigNatural> sorted(primes.begin(), primes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  BigNatural n = 1;
  for (const auto& p : sorted) n *= p;
  const BigNatural nm1 = n - 1;
  for (const auto& p : sorted) {
    if (p < 2) return false;
    const BigNatural pm1 = p - 1;
    if (!mpz_divisible_p(nm1.get_mpz_t(), pm1.get_mpz_t())) return false;
  }
  for (const auto& p : sorted)
    if (!is_prime(p)) return false;
  return true;
}

inline bool korselt_check(std::initializer_list<BigNatural> primes) {
  return korselt_check(std::span<const BigNatural>(primes.begin(), primes.size()));
}

inline bool korselt_check(const CarmichaelRecord& rec) {
  BigNatural prod = 1;
  for (const auto& p : rec.primes) prod *= p;
  return prod == rec.n && std::is_sorted(rec.primes.begin(), rec.primes.end()) && korselt_check(rec.primes);
}

enum class Stage { Ordering, Bound, Divisibility, Primality };

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::Ordering: return "ordering";
    case Stage::Bound: return "bound";
    case Stage::Divisibility: return "divisibility";
    case Stage::Primality: return "primality";
  }
  return "?";
}

struct Rejection {
  Stage stage;
};

using Verdict = std::variant<CarmichaelRecord, Rejection>;

/// Per-stage counters; one instance per worker.
struct VerifyStats {
  u64 candidates = 0;
  u64 rejected_ordering = 0;
  u64 rejected_bound = 0;
  u64 rejected_divisibility = 0;
  u64 rejected_primality = 0;
  u64 primality_calls = 0;
  u64 accepted = 0;

  VerifyStats& operator+=(const VerifyStats& o) {
    candidates += o.candidates;
    rejected_ordering += o.rejected_ordering;
    rejected_bound += o.rejected_bound;
    rejected_divisibility += o.rejected_divisibility;
    rejected_primality += o.rejected_primality;
    primality_calls += o.primality_calls;
    accepted += o.accepted;
    return *this;
  }
};

/// Known primes dividing q-1 and r-1, forwarded to the primality test.
struct PrimalityHints {
  std::span<const u64> q_minus_1;
  std::span<const u64> r_minus_1;
};

namespace detail {

// (a * b * c - 1) mod m == 0, for m >= 1.
inline bool product_is_one_mod(u128 m, u128 a, u128 b, u128 c = 1) {
  if (m == 1) return true;
  if (m <= ~u64{0}) {
    const u64 mm = static_cast<u64>(m);
    u64 acc = mulmod(mod64(a, mm), mod64(b, mm), mm);
    acc = mulmod(acc, mod64(c, mm), mm);
    return acc == 1;
  }
  u128 ab, abc;
  if (checked_mul(a, b, ab) && checked_mul(ab, c, abc)) return abc % m == 1;
  const BigNatural prod = to_big(a) * to_big(b) * to_big(c);
  return prod % to_big(m) == 1;
}

}  // namespace detail

/// Checks whether P q r is a Carmichael number with P its preproduct. Stages
/// in order: ordering sanity (p_{d-2} < q < r, both odd and coprime to P),
/// the bound P q r < B, every Korselt divisibility (p - 1) | (n - 1), and
/// finally primality of q and r.
inline Verdict verify_candidate(const Preproduct& pre, u128 q, u128 r, const Bound& bound,
                                VerifyStats* stats = nullptr, PrimalityHints hints = {}) {
  VerifyStats scratch;
  VerifyStats& st = stats ? *stats : scratch;
  ++st.candidates;

  const u64 P = pre.value;
  if (q <= pre.largest_prime || r <= q || (q & 1) == 0 || (r & 1) == 0 || std::gcd(mod64(q, P), P) != 1 ||
      std::gcd(mod64(r, P), P) != 1) {
    ++st.rejected_ordering;
    return Rejection{Stage::Ordering};
  }
  if (!bound.admits(P, q, r)) {
    ++st.rejected_bound;
    return Rejection{Stage::Bound};
  }
  bool ok = detail::product_is_one_mod(q - 1, P, r) && detail::product_is_one_mod(r - 1, P, q);
  for (std::size_t i = 0; ok && i < pre.factorization.size(); ++i) {
    const u64 p = pre.factorization[i].prime;
    ok = detail::product_is_one_mod(p - 1, P / p, q, r);
  }
  if (!ok) {
    ++st.rejected_divisibility;
    return Rejection{Stage::Divisibility};
  }
  ++st.primality_calls;
  if (!is_prime(q, hints.q_minus_1) || !is_prime(r, hints.r_minus_1)) {
    ++st.rejected_primality;
    return Rejection{Stage::Primality};
  }
  ++st.accepted;
  CarmichaelRecord rec;
  rec.n = BigNatural(static_cast<unsigned long>(P)) * to_big(q) * to_big(r);
  rec.primes.reserve(pre.factorization.size() + 2);
  for (const auto& pe : pre.factorization.factors()) rec.primes.emplace_back(static_cast<unsigned long>(pe.prime));
  rec.primes.push_back(to_big(q));
  rec.primes.push_back(to_big(r));
  return rec;
}

inline Verdict verify_candidate(const Preproduct& pre, const BigNatural& q, const BigNatural& r, const Bound& bound,
                                VerifyStats* stats = nullptr) {
  return verify_candidate(pre, to_u128(q), to_u128(r), bound, stats);
}

}  // namespace carmtab
