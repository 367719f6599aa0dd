#pragma once

// Primality. Below 2^64 the answer is exact (strong probable-prime test on a
// base set with no composite survivors in that range). Above 2^64 an n-1
// proof is attempted from caller-supplied prime hints; otherwise BPSW is
// followed by 40 Miller-Rabin rounds on bases derived from n, bounding the
// error by 4^-40.

#include <gmpxx.h>

#include <array>
#include <optional>
#include <span>

#include "carmtab/bignum.hpp"
#include "carmtab/uint128.hpp"

namespace carmtab {

namespace detail {

inline constexpr std::array<u32, 25> kSmallPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                                     43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

inline bool strong_probable_prime_u64(u64 n, u64 a) {
  a %= n;
  if (a == 0) return true;
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
    if (x == 1) return false;
  }
  return false;
}

inline bool strong_probable_prime(const BigNatural& n, const BigNatural& a) {
  BigNatural nm1 = n - 1;
  BigNatural d = nm1;
  const auto s = mpz_scan1(d.get_mpz_t(), 0);
  d >>= s;
  BigNatural x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == nm1) return true;
  for (mp_bitcnt_t i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == nm1) return true;
    if (x == 1) return false;
  }
  return false;
}

// Strong Lucas test with Selfridge's parameters (P = 1, Q = (1 - D) / 4).
inline bool strong_lucas_probable_prime(const BigNatural& n) {
  if (mpz_perfect_square_p(n.get_mpz_t())) return false;
  long D = 5;
  for (;;) {
    const BigNatural dz(D);
    const int j = mpz_jacobi(dz.get_mpz_t(), n.get_mpz_t());
    if (j == -1) break;
    if (j == 0 && abs(BigNatural(D)) != n) return false;
    D = D > 0 ? -(D + 2) : -D + 2;
  }
  const BigNatural Dz(D);
  const BigNatural Q((1 - D) / 4);

  BigNatural d = n + 1;
  const auto s = mpz_scan1(d.get_mpz_t(), 0);
  d >>= s;

  auto mod = [&](BigNatural v) {
    v %= n;
    if (sgn(v) < 0) v += n;
    return v;
  };
  auto half = [&](BigNatural v) {
    if (mpz_odd_p(v.get_mpz_t())) v += n;
    return BigNatural(v >> 1);
  };

  BigNatural U = 1, V = 1, Qk = mod(Q);
  const auto bits = mpz_sizeinbase(d.get_mpz_t(), 2);
  for (auto i = static_cast<long>(bits) - 2; i >= 0; --i) {
    U = mod(U * V);
    V = mod(V * V - 2 * Qk);
    Qk = mod(Qk * Qk);
    if (mpz_tstbit(d.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      const BigNatural nu = half(mod(U + V));
      const BigNatural nv = half(mod(Dz * U + V));
      U = nu;
      V = nv;
      Qk = mod(Qk * Q);
    }
  }
  if (U == 0 || V == 0) return true;
  for (mp_bitcnt_t r = 1; r < s; ++r) {
    V = mod(V * V - 2 * Qk);
    if (V == 0) return true;
    Qk = mod(Qk * Qk);
  }
  return false;
}

}  // namespace detail

/// Exact for every 64-bit input.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u32 p : detail::kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 97 * 97) return true;
  // Jim Sinclair's base set: no strong pseudoprime below 2^64 survives all seven.
  constexpr std::array<u64, 7> bases = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
  for (u64 a : bases)
    if (!detail::strong_probable_prime_u64(n, a)) return false;
  return true;
}

/// Baillie-PSW: base-2 strong probable prime plus strong Lucas probable prime.
inline bool bpsw_probable_prime(const BigNatural& n) {
  if (n < 2) return false;
  for (u32 p : detail::kSmallPrimes) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  if (!detail::strong_probable_prime(n, 2)) return false;
  return detail::strong_lucas_probable_prime(n);
}

/// Pocklington-Lehmer proof attempt from primes known to divide n-1. Returns
/// nullopt when the factored part is too small or no witness is found.
inline std::optional<bool> pocklington(const BigNatural& n, std::span<const u64> hint_primes) {
  const BigNatural nm1 = n - 1;
  BigNatural factored = 1;
  std::array<u64, 64> used{};
  std::size_t count = 0;
  for (u64 p : hint_primes) {
    if (p < 2 || !is_prime_u64(p) || !mpz_divisible_ui_p(nm1.get_mpz_t(), p)) continue;
    bool seen = false;
    for (std::size_t i = 0; i < count; ++i) seen |= used[i] == p;
    if (seen || count == used.size()) continue;
    used[count++] = p;
    BigNatural rest = nm1;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      rest /= p;
      factored *= p;
    }
  }
  if (factored * factored <= n) return std::nullopt;
  for (std::size_t i = 0; i < count; ++i) {
    const BigNatural e = nm1 / used[i];
    bool witnessed = false;
    for (u32 a : detail::kSmallPrimes) {
      BigNatural x;
      const BigNatural az(a);
      mpz_powm(x.get_mpz_t(), az.get_mpz_t(), nm1.get_mpz_t(), n.get_mpz_t());
      if (x != 1) return false;
      mpz_powm(x.get_mpz_t(), az.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
      BigNatural g;
      const BigNatural xm1 = x - 1;
      mpz_gcd(g.get_mpz_t(), xm1.get_mpz_t(), n.get_mpz_t());
      if (g == 1) {
        witnessed = true;
        break;
      }
    }
    if (!witnessed) return std::nullopt;
  }
  return true;
}

/// Primality of n >= 0. `hint_primes` may list primes dividing n - 1.
inline bool is_prime(const BigNatural& n, std::span<const u64> hint_primes = {}) {
  if (n < 2) return false;
  if (mpz_fits_ulong_p(n.get_mpz_t())) return is_prime_u64(n.get_ui());
  if (mpz_even_p(n.get_mpz_t())) return false;
  if (!hint_primes.empty()) {
    if (auto proof = pocklington(n, hint_primes)) return *proof;
  }
  if (!bpsw_probable_prime(n)) return false;
  // Bases from a fixed-seed generator keyed on n, so results are reproducible.
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(n);
  const BigNatural span = n - 3;
  for (int i = 0; i < 40; ++i) {
    const BigNatural a = rng.get_z_range(span) + 2;
    if (!detail::strong_probable_prime(n, a)) return false;
  }
  return true;
}

inline bool is_prime(u128 n, std::span<const u64> hint_primes = {}) {
  if (n <= ~u64{0}) return is_prime_u64(static_cast<u64>(n));
  return is_prime(to_big(n), hint_primes);
}

}  // namespace carmtab
