#pragma once

// Completion of a small preproduct P: every (q, r) with P q r Carmichael.
//
// With 2 <= D < P < C and Delta = C D - P^2,
//   q = (P-1)(P+D)/Delta + 1,   r = (P-1)(P+C)/Delta + 1,
//   P^2 < C D < P^2 (p+3)/(p+1),   p the largest prime of P.
// The CD loop scans C for each D; the D-Delta loop walks the divisors Delta
// of (P-1)(P+D) instead; the hybrid picks the shorter loop per D.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#ifdef __AVX512F__
#include <immintrin.h>
#endif

#include "carmtab/bignum.hpp"
#include "carmtab/korselt.hpp"
#include "carmtab/numtheory.hpp"
#include "carmtab/preproduct.hpp"
#include "carmtab/sieve.hpp"

namespace carmtab {

/// Small-case arithmetic runs in 64/128-bit words up to this P.
inline constexpr u64 kMaxSmallPreproduct = u64{1} << 31;

/// Below this P the C scan runs in double-precision vector lanes, where every
/// integer it compares stays below 2^53.
inline constexpr u64 kVectorCdLimit = u64{1} << 20;

struct SmallCaseOptions {
  /// Walk divisors of ((P-1)/2)(P+D): q - 1 must be even.
  bool parity_filter = true;
  /// For p in {3, 5, 7} dividing D, only Delta = -P^2 (mod p) can make C integral.
  bool residue_filter = true;
  std::size_t segment_length = FactorSieve::kDefaultSegment;
};

enum class InnerLoop { CD, DDelta };

struct SmallCaseStats {
  u64 d_values = 0;
  u64 cd_loops = 0;
  u64 ddelta_loops = 0;
  u64 cd_pairs = 0;      // (C, D) pairs scanned
  u64 ddelta_pairs = 0;  // (D, Delta) pairs generated
  u64 integral = 0;      // candidates with integral q and r
  VerifyStats verify;

  SmallCaseStats& operator+=(const SmallCaseStats& o) {
    d_values += o.d_values;
    cd_loops += o.cd_loops;
    ddelta_loops += o.ddelta_loops;
    cd_pairs += o.cd_pairs;
    ddelta_pairs += o.ddelta_pairs;
    integral += o.integral;
    verify += o.verify;
    return *this;
  }
};

/// Exact number of C with P^2 < C D < P^2 (p+3)/(p+1).
inline u64 cd_candidate_count(const Preproduct& pre, u64 D) {
  const u128 P2 = static_cast<u128>(pre.value) * pre.value;
  const u128 p = pre.largest_prime;
  const u128 c_lo = P2 / D + 1;
  const u128 c_hi = (P2 * (p + 3) - 1) / ((p + 1) * D);
  return c_hi >= c_lo ? static_cast<u64>(c_hi - c_lo + 1) : 0;
}

/// Hybrid rule: the D-Delta loop unless the C scan is strictly shorter.
inline InnerLoop hybrid_choice(u64 cd_count, u64 divisor_count) {
  return divisor_count <= cd_count ? InnerLoop::DDelta : InnerLoop::CD;
}

namespace detail {

using vd = double __attribute__((vector_size(64)));

// Bit l is set when x[l] | M[l]. All values are integers below 2^53. The
// quotient only has to be right when it is an integer, so rounding M / x to
// the nearest integer and testing M - round(M / x) x == 0 is exact.
inline unsigned divides_bits(vd M, vd x) {
#ifdef __AVX512F__
  const __m512d m = reinterpret_cast<__m512d>(M), v = reinterpret_cast<__m512d>(x);
  const __m512d two = _mm512_set1_pd(2.0);
  __m512d r = _mm512_rcp14_pd(v);
  r = _mm512_mul_pd(r, _mm512_fnmadd_pd(v, r, two));
  r = _mm512_mul_pd(r, _mm512_fnmadd_pd(v, r, two));
  const __m512d q = _mm512_roundscale_pd(_mm512_mul_pd(m, r), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  return _mm512_cmp_pd_mask(_mm512_fnmadd_pd(q, v, m), _mm512_setzero_pd(), _CMP_EQ_OQ);
#else
  unsigned bits = 0;
  for (int l = 0; l < 8; ++l)
    if (std::fmod(M[l], x[l]) == 0.0) bits |= 1u << l;
  return bits;
#endif
}

// Divisibility by a fixed d via multiplication by the inverse of its odd part.
class ExactDivisibility {
 public:
  explicit ExactDivisibility(u64 d) : shift_(static_cast<unsigned>(__builtin_ctzll(d))) {
    const u64 odd = d >> shift_;
    u64 inv = odd;  // Newton iteration for odd^-1 mod 2^64
    for (int i = 0; i < 5; ++i) inv *= 2 - odd * inv;
    inv_ = inv;
    max_ = ~u64{0} / odd;
    mask_ = (u64{1} << shift_) - 1;
  }
  bool divides(u64 n) const { return (n & mask_) == 0 && (n >> shift_) * inv_ <= max_; }

 private:
  unsigned shift_;
  u64 inv_, max_, mask_;
};

inline constexpr std::array<u64, 3> kResiduePrimes = {3, 5, 7};

class SmallCaseCompleter {
 public:
  SmallCaseCompleter(const Preproduct& pre, const Bound& bound, const SmallCaseOptions& opts, SmallCaseStats& stats,
                     const FactorSieve* shared)
      : pre_(pre), bound_(bound), opts_(opts), stats_(stats), shared_(shared) {
    if (pre.value > kMaxSmallPreproduct) throw std::invalid_argument("small-case preproduct above 2^31");
    P_ = pre.value;
    P2_ = P_ * P_;
    p_ = pre.largest_prime;
    delta_limit_ = static_cast<u64>((static_cast<u128>(2) * P2_ - 1) / (p_ + 1));
    pm1_ = (shared_ && shared_->contains(P_ - 1)) ? shared_->factor(P_ - 1) : trial_factor(P_ - 1);
    pm1_half_ = halve(pm1_);
    for (const auto& pe : pm1_.factors()) pm1_primes_.push_back(pe.prime);
  }

  std::vector<CarmichaelRecord> take() {
    std::sort(out_.begin(), out_.end());
    return std::move(out_);
  }

  /// Runs D = 2 .. P-1, fetching factorizations of P + D block by block.
  template <class PerD>
  void for_each_d(bool need_factor, PerD&& per_d) {
    const u64 d_end = P_;  // exclusive
    if (!need_factor) {
      for (u64 D = 2; D < d_end; ++D) per_d(D, nullptr);
      return;
    }
    const bool covered = shared_ && shared_->contains(P_ + 2) && shared_->contains(2 * P_ - 1);
    if (covered) {
      for (u64 D = 2; D < d_end; ++D) {
        const Factorization f = shared_->factor(P_ + D);
        per_d(D, &f);
      }
      return;
    }
    const u64 block = std::max<std::size_t>(opts_.segment_length, 1);
    for (u64 d0 = 2; d0 < d_end; d0 += block) {
      const u64 d1 = std::min(d_end, d0 + block);
      const FactorSieve sieve(P_ + d0, P_ + d1, opts_.segment_length);
      for (u64 D = d0; D < d1; ++D) {
        const Factorization f = sieve.factor(P_ + D);
        per_d(D, &f);
      }
    }
  }

  /// Every C with P^2 < C D < P^2 (p+3)/(p+1), i.e. Delta = Delta_0 + j D for
  /// j < count, keeping those with Delta | M = (P-1)(P+D). Small Delta are
  /// tested one C at a time; above sqrt(M D) the quotient M / Delta is below
  /// sqrt(M / D), so that part of the interval is covered by scanning the
  /// quotient k and testing k | M with M / k = Delta_0 (mod D).
  void cd_loop(u64 D) {
    ++stats_.cd_loops;
    const u64 count = cd_candidate_count(pre_, D);
    if (count == 0) return;
    stats_.cd_pairs += count;
    const CdScan sc = cd_scan(D, count);
    if (P_ < kVectorCdLimit) {
      cd_direct_vec(sc);
      cd_quotient_vec(sc);
      return;
    }
    for (u64 j = 0; j < sc.split; ++j) {
      const u64 delta = sc.delta0 + j * D;
      if (sc.M % delta == 0) on_cd_hit(D, sc.c_lo + j, delta);
    }
    for (u64 k = sc.k_lo; k <= sc.k_hi; ++k) {
      if (sc.M % k == 0) cd_quotient_hit(sc, k);
    }
  }

 private:
  struct CdScan {
    u64 D, M, c_lo, delta0, count;
    u64 split;       // j < split: direct test
    u64 k_lo, k_hi;  // quotients of the remaining Delta; empty when k_lo > k_hi
  };

  CdScan cd_scan(u64 D, u64 count) const {
    CdScan sc{};
    sc.D = D;
    sc.M = (P_ - 1) * (P_ + D);
    sc.c_lo = P2_ / D + 1;
    sc.delta0 = sc.c_lo * D - P2_;
    sc.count = count;
    const u64 root = static_cast<u64>(isqrt(static_cast<u128>(sc.M) * D));
    sc.split = root <= sc.delta0 ? 0 : std::min(count, (root - sc.delta0 + D - 1) / D);
    sc.k_lo = 1;
    sc.k_hi = 0;
    if (sc.split < count) {
      const u64 first = sc.delta0 + sc.split * D;
      const u64 last = sc.delta0 + (count - 1) * D;
      sc.k_hi = sc.M / first;
      sc.k_lo = std::max<u64>(1, (sc.M + last - 1) / last);
    }
    return sc;
  }

  void cd_quotient_hit(const CdScan& sc, u64 k) {
    const u64 delta = sc.M / k;
    if (delta < sc.delta0 || (delta - sc.delta0) % sc.D != 0) return;
    const u64 j = (delta - sc.delta0) / sc.D;
    if (j < sc.split || j >= sc.count) return;
    on_cd_hit(sc.D, sc.c_lo + j, delta);
  }

  void cd_direct_vec(const CdScan& sc) {
    const vd M = vd{} + static_cast<double>(sc.M);
    const vd step = vd{} + static_cast<double>(8 * sc.D);
    vd delta;
    for (int l = 0; l < 8; ++l) delta[l] = static_cast<double>(sc.delta0 + l * sc.D);
    for (u64 j = 0; j < sc.split; j += 8, delta += step) {
      const unsigned hit = divides_bits(M, delta);
      if (hit == 0) continue;
      for (u64 l = 0; l < 8 && j + l < sc.split; ++l)
        if (hit >> l & 1) on_cd_hit(sc.D, sc.c_lo + j + l, sc.delta0 + (j + l) * sc.D);
    }
  }

  void cd_quotient_vec(const CdScan& sc) {
    if (sc.k_lo > sc.k_hi) return;
    const vd M = vd{} + static_cast<double>(sc.M);
    const vd step = vd{} + 8.0;
    vd k;
    for (int l = 0; l < 8; ++l) k[l] = static_cast<double>(sc.k_lo + l);
    for (u64 k0 = sc.k_lo; k0 <= sc.k_hi; k0 += 8, k += step) {
      const unsigned hit = divides_bits(M, k);
      if (hit == 0) continue;
      for (u64 l = 0; l < 8 && k0 + l <= sc.k_hi; ++l)
        if (hit >> l & 1) cd_quotient_hit(sc, k0 + l);
    }
  }

 public:
  /// Size of the divisor odometer for this D, with the exponent windows that
  /// the filters impose; zero when the residue filter excludes every Delta.
  u64 ddelta_size(u64 D, const Factorization& p_plus_d) {
    prepare_target(D, p_plus_d);
    if (!feasible_) return 0;
    u64 size = 1;
    for (std::size_t i = 0; i < target_.size(); ++i) size *= static_cast<u64>(max_exp_[i] - min_exp_[i] + 1);
    return size;
  }

  /// Requires a preceding ddelta_size(D, ...) call with the same D.
  void ddelta_loop(u64 D) {
    ++stats_.ddelta_loops;
    if (!feasible_) return;
    const u64 M = (P_ - 1) * (P_ + D);
    collect_divisors();
    stats_.ddelta_pairs += divs_.size();
    const ExactDivisibility by_d(D);
    for (const u64 delta : divs_) {
      if (by_d.divides(P2_ + delta)) on_candidate(M / delta, (P2_ + delta) / D, delta);
    }
  }

 private:
  // divs_ = divisors of target_ within the exponent windows, capped at delta_limit_.
  void collect_divisors() {
    divs_.assign(1, 1);
    for (std::size_t i = 0; i < target_.size(); ++i) {
      const u64 p = target_[i].prime;
      const u64 cap = delta_limit_ / p;
      for (u32 e = 0; e < min_exp_[i]; ++e) {
        std::size_t w = 0;
        for (const u64 d : divs_)
          if (d <= cap) divs_[w++] = d * p;
        divs_.resize(w);
      }
      std::size_t from = 0;
      for (u32 e = min_exp_[i]; e < max_exp_[i]; ++e) {
        const std::size_t to = divs_.size();
        for (std::size_t k = from; k < to; ++k)
          if (divs_[k] <= cap) divs_.push_back(divs_[k] * p);
        if (divs_.size() == to) break;
        from = to;
      }
    }
  }

  void on_cd_hit(u64 D, u64 C, u64 delta) {
    const u64 M = (P_ - 1) * (P_ + D);
    on_candidate(M / delta, C, delta);
  }

  void on_candidate(u64 q_minus_1, u64 C, u64 delta) {
    const u128 r_num = static_cast<u128>(P_ - 1) * (P_ + C);
    if (r_num % delta != 0) return;
    ++stats_.integral;
    const u128 q = static_cast<u128>(q_minus_1) + 1;
    const u128 r = r_num / delta + 1;
    PrimalityHints hints{{}, pm1_primes_};
    auto verdict = verify_candidate(pre_, q, r, bound_, &stats_.verify, hints);
    if (auto* rec = std::get_if<CarmichaelRecord>(&verdict)) out_.push_back(std::move(*rec));
  }

  void prepare_target(u64 D, const Factorization& p_plus_d) {
    target_ = (opts_.parity_filter ? pm1_half_ : pm1_) * p_plus_d;
    for (std::size_t i = 0; i < target_.size(); ++i) {
      min_exp_[i] = 0;
      max_exp_[i] = target_[i].exponent;
    }
    feasible_ = true;
    if (!opts_.residue_filter) return;
    for (u64 p : kResiduePrimes) {
      if (D % p != 0) continue;
      std::size_t idx = target_.size();
      for (std::size_t i = 0; i < target_.size(); ++i)
        if (target_[i].prime == p) idx = i;
      if (P_ % p == 0) {
        // Delta = 0 (mod p).
        if (idx == target_.size()) {
          feasible_ = false;
          return;
        }
        min_exp_[idx] = 1;
      } else {
        // Delta = -P^2 != 0 (mod p): p never enters the odometer. The
        // residue itself is enforced by the test D | P^2 + Delta.
        if (idx != target_.size()) max_exp_[idx] = 0;
      }
    }
  }

  const Preproduct& pre_;
  const Bound& bound_;
  const SmallCaseOptions& opts_;
  SmallCaseStats& stats_;
  const FactorSieve* shared_;
  u64 P_, P2_, p_, delta_limit_;
  Factorization pm1_, pm1_half_;
  std::vector<u64> pm1_primes_;
  std::vector<CarmichaelRecord> out_;

  Factorization target_;
  std::array<u32, Factorization::kCapacity> min_exp_{}, max_exp_{};
  std::vector<u64> divs_;
  bool feasible_ = true;
};

}  // namespace detail

/// CD method: outer loop on D, inner loop on every admissible C.
inline std::vector<CarmichaelRecord> cd_completions(const Preproduct& pre, const Bound& bound,
                                                    SmallCaseStats* stats = nullptr) {
  SmallCaseStats local;
  SmallCaseOptions opts;
  detail::SmallCaseCompleter run(pre, bound, opts, stats ? *stats : local, nullptr);
  for (u64 D = 2; D < pre.value; ++D) {
    ++(stats ? *stats : local).d_values;
    run.cd_loop(D);
  }
  return run.take();
}

/// D-Delta method: inner loop over divisors Delta of (P-1)(P+D). `sieve`, when
/// it covers [P+2, 2P-1] (and P-1), replaces the per-P segment sieves.
inline std::vector<CarmichaelRecord> ddelta_completions(const Preproduct& pre, const Bound& bound,
                                                        const FactorSieve* sieve = nullptr,
                                                        const SmallCaseOptions& opts = {},
                                                        SmallCaseStats* stats = nullptr) {
  SmallCaseStats local;
  detail::SmallCaseCompleter run(pre, bound, opts, stats ? *stats : local, sieve);
  run.for_each_d(true, [&](u64 D, const Factorization* f) {
    ++(stats ? *stats : local).d_values;
    run.ddelta_size(D, *f);
    run.ddelta_loop(D);
  });
  return run.take();
}

/// Per D, enters whichever inner loop is shorter (exact C count against the
/// size of the divisor odometer); ties go to the D-Delta loop.
inline std::vector<CarmichaelRecord> hybrid_completions(const Preproduct& pre, const Bound& bound,
                                                        const FactorSieve* sieve = nullptr,
                                                        const SmallCaseOptions& opts = {},
                                                        SmallCaseStats* stats = nullptr) {
  SmallCaseStats local;
  detail::SmallCaseCompleter run(pre, bound, opts, stats ? *stats : local, sieve);
  run.for_each_d(true, [&](u64 D, const Factorization* f) {
    ++(stats ? *stats : local).d_values;
    const u64 divisors = run.ddelta_size(D, *f);
    if (hybrid_choice(cd_candidate_count(pre, D), divisors) == InnerLoop::DDelta)
      run.ddelta_loop(D);
    else
      run.cd_loop(D);
  });
  return run.take();
}

/// The loop the hybrid enters for one D.
inline InnerLoop hybrid_choice_for(const Preproduct& pre, u64 D, const SmallCaseOptions& opts = {}) {
  SmallCaseStats stats;
  detail::SmallCaseCompleter run(pre, Bound::unbounded(), opts, stats, nullptr);
  const u64 divisors = run.ddelta_size(D, trial_factor(pre.value + D));
  return hybrid_choice(cd_candidate_count(pre, D), divisors);
}

/// Size of the D-Delta divisor odometer for one D.
inline u64 ddelta_divisor_count(const Preproduct& pre, u64 D, const SmallCaseOptions& opts = {}) {
  SmallCaseStats stats;
  detail::SmallCaseCompleter run(pre, Bound::unbounded(), opts, stats, nullptr);
  return run.ddelta_size(D, trial_factor(pre.value + D));
}

}  // namespace carmtab
