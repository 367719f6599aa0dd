#pragma once

// Enumeration of preproducts for both regimes, with deterministic sharding.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "carmtab/bignum.hpp"
#include "carmtab/largecase.hpp"
#include "carmtab/preproduct.hpp"
#include "carmtab/sieve.hpp"

namespace carmtab {

struct Shard {
  u64 index = 0;
  u64 total = 1;

  friend bool operator==(const Shard&, const Shard&) = default;
};

/// Parses "i/n" with 0 <= i < n.
inline Shard parse_shard(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) throw std::invalid_argument("shard must be i/n");
  try {
    Shard s{std::stoull(std::string(text.substr(0, slash))), std::stoull(std::string(text.substr(slash + 1)))};
    if (s.total == 0 || s.index >= s.total) throw std::invalid_argument("shard index out of range");
    return s;
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad shard: " + std::string(text));
  }
}

enum class Mode { Small, Large, Full, Oracle };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Small: return "small";
    case Mode::Large: return "large";
    case Mode::Full: return "full";
    case Mode::Oracle: return "oracle";
  }
  return "?";
}

struct TabulationConfig {
  std::optional<BigNatural> bound;   // B; required except for an unbounded small run
  std::optional<u64> crossover;      // X; defaults to ceil(B^(1/3))
  Mode mode = Mode::Full;
  Shard shard;
  std::filesystem::path output_dir = ".";
  bool bounded_small = true;         // small case: drop n >= B
  std::optional<unsigned> d;         // large case: only this factor count
  std::optional<u64> min_p, max_p;   // small case: P in [min_p, max_p)
  std::optional<std::filesystem::path> hard_report;
  unsigned jobs = 1;
};

inline u64 default_crossover(const BigNatural& B) {
  const BigNatural x = ceil_cbrt(B);
  if (!mpz_fits_ulong_p(x.get_mpz_t())) throw std::invalid_argument("bound too large");
  return x.get_ui();
}

inline u64 crossover_of(const TabulationConfig& cfg) {
  if (cfg.crossover) return *cfg.crossover;
  if (!cfg.bound) throw std::invalid_argument("crossover needs a bound");
  return default_crossover(*cfg.bound);
}

/// The level-preproducts (partial products with `level` primes) are numbered
/// in enumeration order; shard i expands those with number = i (mod n).
struct ShardPlan {
  unsigned level = 1;
  Shard shard;
};

/// Shard level for factor count d: floor((d-1)/2) primes, at least one.
inline unsigned shard_level(unsigned d) { return std::max(1u, (d - 1) / 2); }

inline auto shard_filter(const ShardPlan& plan, const Shard& shard) {
  if (shard.total == 0) throw std::invalid_argument("shard total must be positive");
  (void)plan;
  return [shard](u64 counter) { return counter % shard.total == shard.index; };
}

/// Every odd cyclic P in [lo, hi), ascending, factored by a segmented sieve.
template <class Visit>
void small_preproducts(u64 lo, u64 hi, Visit&& visit, std::size_t segment_length = FactorSieve::kDefaultSegment) {
  lo = std::max<u64>(lo, 3);
  for (u64 s = lo; s < hi; s += segment_length) {
    const u64 e = std::min<u64>(hi, s + segment_length);
    const FactorSieve sieve(s, e, segment_length);
    for (u64 P = s | 1; P < e; P += 2) {
      if (auto pre = make_preproduct(sieve.factor(P))) visit(*pre);
    }
  }
}

inline std::vector<Preproduct> small_preproducts(u64 X) {
  std::vector<Preproduct> out;
  small_preproducts(3, X, [&](const Preproduct& p) { out.push_back(p); });
  return out;
}

/// Largest d for which the product of the first d odd primes is below B.
inline unsigned max_factor_count(const Bound& B) {
  unsigned d = 0;
  u128 prod = 1;
  for (u64 p = 3;; p += 2) {
    bool prime = true;
    for (u64 f = 3; f * f <= p; f += 2) prime &= p % f != 0;
    if (!prime) continue;
    if (!checked_mul(prod, p, prod) || !B.admits(prod)) return d;
    ++d;
  }
}

namespace detail {

// Depth-first construction of P = p_1 ... p_{d-2} >= X and then q.
class LargeEnumerator {
 public:
  LargeEnumerator(const Bound& B, u64 X, unsigned d, const PrimeTable& primes, Shard shard)
      : B_(B), X_(X), d_(d), k_(d - 2), primes_(primes), level_(shard_level(d)), shard_(shard) {}

  template <class Visit>
  void run(Visit&& visit) {
    if (d_ < 3) return;
    Factorization f;
    descend(0, 1, 1, f, 0, visit);
  }

  u64 count_p = 0;
  u64 count_pq = 0;

 private:
  // value * p^m < B
  bool fits(u64 value, u64 p, unsigned m) const {
    u128 v = value;
    for (unsigned i = 0; i < m; ++i)
      if (!checked_mul(v, p, v)) return false;
    return B_.admits(v);
  }

  template <class Visit>
  void descend(unsigned j, u64 value, u64 lambda, const Factorization& f, std::size_t next, Visit& visit) {
    if (j == k_) {
      complete(value, lambda, f, next, visit);
      return;
    }
    const unsigned remaining = d_ - j;
    std::size_t i = next;
    if (j + 1 == k_) i = std::max(i, primes_.lower_index((X_ + value - 1) / value));
    for (; i < primes_.size(); ++i) {
      const u64 p = primes_[i];
      if (!fits(value, p, remaining)) break;
      if (std::gcd(p - 1, value) != 1) continue;
      if (j + 1 == level_ && counter_++ % shard_.total != shard_.index) continue;
      Factorization g = f;
      g.push(p, 1);
      descend(j + 1, value * p, lcm64(lambda, p - 1), g, i + 1, visit);
    }
  }

  template <class Visit>
  void complete(u64 value, u64 lambda, const Factorization& f, std::size_t next, Visit& visit) {
    if (value < X_) return;
    ++count_p;
    Preproduct pre;
    pre.value = value;
    pre.factorization = f;
    pre.lambda = lambda;
    pre.largest_prime = f.largest_prime();
    pre.cofactor = value / pre.largest_prime;
    for (std::size_t i = next; i < primes_.size(); ++i) {
      const u64 q = primes_[i];
      if (!fits(value, q, 2)) break;
      if (std::gcd(q - 1, value) != 1) continue;
      if (auto pp = make_preproduct_pq(pre, q)) {
        ++count_pq;
        visit(*pp);
      }
    }
  }

  const Bound& B_;
  u64 X_;
  unsigned d_, k_;
  const PrimeTable& primes_;
  unsigned level_;
  Shard shard_;
  u64 counter_ = 0;
};

inline void check_large_bound(const Bound& B, u64 X) {
  if (!B.bounded()) throw std::invalid_argument("the large case needs a bound");
  if (!fits_u128(B.value()) || B.value() > BigNatural("18446744073709551616")) {
    throw std::invalid_argument("the large case supports B <= 2^64");
  }
  if (X < 3 || !B.admits(X)) throw std::invalid_argument("crossover must satisfy 3 <= X < B");
}

inline u64 large_prime_limit(const Bound& B, u64 X) {
  const u128 b = B.saturated();
  const u128 ratio = (b + X - 1) / X;
  u128 s = isqrt(ratio);
  if (s * s < ratio) ++s;
  return static_cast<u64>(s);
}

}  // namespace detail

/// Every cyclic Pq = p_1 ... p_{d-2} q with P >= X and Pq^2 < B, for each
/// d in [3, max_factor_count(B)] (or only `only_d`), restricted to `shard`.
/// Preproducts arrive grouped by d, in depth-first order.
template <class Visit>
void large_preproducts(const Bound& B, u64 X, std::optional<unsigned> only_d, Shard shard, Visit&& visit) {
  detail::check_large_bound(B, X);
  const PrimeTable primes(detail::large_prime_limit(B, X));
  const unsigned dmax = max_factor_count(B);
  for (unsigned d = 3; d <= dmax; ++d) {
    if (only_d && *only_d != d) continue;
    detail::LargeEnumerator e(B, X, d, primes, shard);
    e.run([&](const PreproductPQ& pp) { visit(pp, d); });
  }
}

inline std::vector<PreproductPQ> large_preproducts(const TabulationConfig& cfg) {
  if (!cfg.bound) throw std::invalid_argument("the large case needs a bound");
  std::vector<PreproductPQ> out;
  large_preproducts(Bound(*cfg.bound), crossover_of(cfg), cfg.d, cfg.shard,
                    [&](const PreproductPQ& pp, unsigned) { out.push_back(pp); });
  return out;
}

struct PreproductCounts {
  u64 count_p = 0;
  u64 count_pq = 0;
};

/// Exact numbers of emitted P (with at least the bound-admissible shape) and Pq.
inline PreproductCounts count_preproducts(const TabulationConfig& cfg) {
  if (!cfg.bound) throw std::invalid_argument("the large case needs a bound");
  const Bound B(*cfg.bound);
  const u64 X = crossover_of(cfg);
  detail::check_large_bound(B, X);
  const PrimeTable primes(detail::large_prime_limit(B, X));
  PreproductCounts c;
  for (unsigned d = 3; d <= max_factor_count(B); ++d) {
    if (cfg.d && *cfg.d != d) continue;
    detail::LargeEnumerator e(B, X, d, primes, cfg.shard);
    e.run([](const PreproductPQ&) {});
    c.count_p += e.count_p;
    c.count_pq += e.count_pq;
  }
  return c;
}

}  // namespace carmtab
