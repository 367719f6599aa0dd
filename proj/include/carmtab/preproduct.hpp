#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "carmtab/numtheory.hpp"

namespace carmtab {

/// An odd cyclic P = p_1 ... p_{d-2}: the part of a Carmichael number n = P q r
/// below its two largest primes.
struct Preproduct {
  u64 value = 0;
  Factorization factorization;
  u64 lambda = 0;         // lambda(P)
  u64 largest_prime = 0;  // p_{d-2}
  u64 cofactor = 1;       // P / p_{d-2}
};

/// Builds a Preproduct when f is odd, cyclic and at least 3.
inline std::optional<Preproduct> make_preproduct(const Factorization& f) {
  if (f.value() < 3 || (f.value() & 1) == 0 || !is_cyclic(f)) return std::nullopt;
  Preproduct p;
  p.value = f.value();
  p.factorization = f;
  p.lambda = carmichael_lambda(f);
  p.largest_prime = f.largest_prime();
  p.cofactor = p.value / p.largest_prime;
  return p;
}

inline Preproduct make_preproduct(u64 value) {
  auto p = make_preproduct(trial_factor(value));
  if (!p) throw std::invalid_argument("not an odd cyclic number: " + std::to_string(value));
  return *p;
}

}  // namespace carmtab
