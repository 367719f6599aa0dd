#pragma once

// Prime tables and a segmented sieve that factors every integer of a range.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "carmtab/numtheory.hpp"
#include "carmtab/uint128.hpp"

namespace carmtab {

/// All primes <= limit, ascending.
class PrimeTable {
 public:
  explicit PrimeTable(u64 limit) : limit_(limit) {
    if (limit > (u64{1} << 32)) throw std::invalid_argument("PrimeTable limit above 2^32");
    if (limit < 2) return;
    std::vector<bool> composite(limit + 1, false);
    for (u64 i = 2; i * i <= limit; ++i)
      if (!composite[i])
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    for (u64 i = 2; i <= limit; ++i)
      if (!composite[i]) primes_.push_back(static_cast<u32>(i));
  }

  u64 limit() const { return limit_; }
  std::span<const u32> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  u32 operator[](std::size_t i) const { return primes_[i]; }

  /// Index of the first prime >= x.
  std::size_t lower_index(u64 x) const {
    return static_cast<std::size_t>(std::lower_bound(primes_.begin(), primes_.end(), x,
                                                     [](u32 p, u64 v) { return p < v; }) -
                                    primes_.begin());
  }

 private:
  u64 limit_;
  std::vector<u32> primes_;
};

/// Factorization data for every n in [lo, hi). Each entry keeps the list of its
/// distinct prime factors up to sqrt(hi); exponents and the (at most one)
/// larger prime are recovered by division on lookup. Built segment by segment
/// so the working set of the inner sieving loop stays in cache.
class FactorSieve {
 public:
  static constexpr std::size_t kDefaultSegment = std::size_t{1} << 22;

  FactorSieve(u64 lo, u64 hi, std::size_t segment_length = kDefaultSegment) : lo_(lo), hi_(hi) {
    if (lo < 2 || hi <= lo) throw std::invalid_argument("FactorSieve: need 2 <= lo < hi");
    if (segment_length == 0) throw std::invalid_argument("FactorSieve: zero segment length");
    const u64 root = isqrt(hi - 1);
    const PrimeTable sieving(root);
    const u64 len = hi - lo;
    offsets_.assign(len + 1, 0);

    std::vector<u32> counts;
    for (u64 seg_lo = lo; seg_lo < hi; seg_lo += segment_length) {
      const u64 seg_hi = std::min<u64>(hi, seg_lo + segment_length);
      const std::size_t seg_len = seg_hi - seg_lo;
      counts.assign(seg_len, 0);
      for (u32 p : sieving.primes()) {
        for (u64 m = first_multiple(seg_lo, p); m < seg_hi; m += p) ++counts[m - seg_lo];
      }
      const u64 base = offsets_[seg_lo - lo];
      u64 running = base;
      for (std::size_t i = 0; i < seg_len; ++i) {
        offsets_[seg_lo - lo + i] = running;
        running += counts[i];
      }
      offsets_[seg_hi - lo] = running;
      primes_.resize(running);
      std::fill(counts.begin(), counts.end(), 0);  // reused as cursors
      for (u32 p : sieving.primes()) {
        for (u64 m = first_multiple(seg_lo, p); m < seg_hi; m += p) {
          const std::size_t i = m - seg_lo;
          primes_[offsets_[seg_lo - lo + i] + counts[i]++] = p;
        }
      }
    }
  }

  u64 lo() const { return lo_; }
  u64 hi() const { return hi_; }
  bool contains(u64 n) const { return n >= lo_ && n < hi_; }

  Factorization factor(u64 n) const {
    if (!contains(n)) throw std::out_of_range("FactorSieve: value outside sieved range");
    Factorization f;
    u64 rest = n;
    const u64 begin = offsets_[n - lo_], end = offsets_[n - lo_ + 1];
    for (u64 k = begin; k < end; ++k) {
      const u64 p = primes_[k];
      u32 e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      f.push(p, e);
    }
    if (rest > 1) f.push(rest, 1);
    return f;
  }

 private:
  static u64 first_multiple(u64 lo, u64 p) {
    const u64 m = (lo + p - 1) / p * p;
    return m < p * 2 ? p * 2 : m;  // skip p itself: a prime entry gets no sieving primes
  }

  u64 lo_, hi_;
  std::vector<u64> offsets_;
  std::vector<u32> primes_;
};

}  // namespace carmtab
