#pragma once

// Completion of a large preproduct Pq: all primes r with P q r Carmichael.
// Every such r satisfies Pq r = 1 (mod lambda(Pq)) and (r - 1) | (Pq - 1).

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "carmtab/factor64.hpp"
#include "carmtab/korselt.hpp"
#include "carmtab/numtheory.hpp"
#include "carmtab/preproduct.hpp"

namespace carmtab {

struct PreproductPQ {
  Preproduct base;  // P
  u64 q = 0;
  u64 value = 0;  // Pq
  Factorization factorization;
  u64 lambda = 0;  // lambda(Pq)
  u64 r_star = 0;  // Pq^-1 mod lambda(Pq), in [1, lambda]
};

/// Extends P by a prime q above its largest prime; nullopt unless Pq is cyclic.
inline std::optional<PreproductPQ> make_preproduct_pq(const Preproduct& base, u64 q) {
  if (q <= base.largest_prime || std::gcd(q - 1, base.value) != 1) return std::nullopt;
  u128 v = static_cast<u128>(base.value) * q;
  if (v > ~u64{0}) throw std::overflow_error("Pq exceeds 64 bits");
  PreproductPQ pp;
  pp.base = base;
  pp.q = q;
  pp.value = static_cast<u64>(v);
  Factorization fq;
  fq.push(q, 1);
  pp.factorization = base.factorization * fq;
  pp.lambda = lcm64(base.lambda, q - 1);
  const auto inv = mod_inverse(pp.value % pp.lambda, pp.lambda);
  if (!inv) return std::nullopt;
  pp.r_star = *inv == 0 ? pp.lambda : *inv;
  return pp;
}

/// Splits an odd cyclic Pq (at least two primes) at its largest prime.
inline PreproductPQ make_preproduct_pq(u64 pq) {
  const Factorization f = trial_factor(pq);
  if (f.size() < 2) throw std::invalid_argument("Pq needs at least two prime factors");
  const u64 q = f.largest_prime();
  Factorization fp;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) fp.push(f[i].prime, f[i].exponent);
  auto base = make_preproduct(fp);
  if (!base) throw std::invalid_argument("not an odd cyclic number: " + std::to_string(pq));
  auto pp = make_preproduct_pq(*base, q);
  if (!pp) throw std::invalid_argument("not an odd cyclic number: " + std::to_string(pq));
  return *pp;
}

/// Raised when the worst-case cofactor cannot be factored within budget.
class HardInputError : public std::runtime_error {
 public:
  HardInputError(u64 pq, u64 lambda, std::string reason)
      : std::runtime_error(std::to_string(pq) + " " + std::to_string(lambda) + " " + reason),
        pq_(pq),
        lambda_(lambda),
        reason_(std::move(reason)) {}

  u64 pq() const { return pq_; }
  u64 lambda() const { return lambda_; }
  const std::string& reason() const { return reason_; }

  /// "Pq lambda(Pq) reason" as written to the hard-input report.
  std::string report_line() const { return what(); }

 private:
  u64 pq_, lambda_;
  std::string reason_;
};

/// Divisors t of Pcal = (Pq-1)/g with t = R1 (mod S), where g = gcd(r*-1, lambda),
/// R1 = (r*-1)/g, S = lambda/g; every admissible r is g t + 1.
struct ResidueProblem {
  u64 g = 0;
  u64 R1 = 0;
  u64 S = 0;
  u64 Pcal = 0;
  u64 R2 = 0;  // class of the cofactor Pcal / t; meaningful when r* > 1
};

inline ResidueProblem make_residue_problem(const PreproductPQ& pp) {
  ResidueProblem rp;
  rp.g = std::gcd(pp.r_star - 1, pp.lambda);
  rp.R1 = (pp.r_star - 1) / rp.g;
  rp.S = pp.lambda / rp.g;
  if ((pp.value - 1) % rp.g != 0) throw std::logic_error("gcd(r*-1, lambda) does not divide Pq-1");
  rp.Pcal = (pp.value - 1) / rp.g;
  if (pp.r_star > 1) {
    const auto inv = mod_inverse(rp.R1 % rp.S, rp.S);
    if (!inv) throw std::logic_error("R1 not invertible modulo S");
    rp.R2 = static_cast<u64>(static_cast<u128>(rp.Pcal % rp.S) * *inv % rp.S);
  }
  return rp;
}

/// Counters for one or more searches; `candidates` counts the divisibility
/// tests (or progression terms) a search performs.
struct LargeCaseStats {
  u64 preproducts = 0;
  u64 easy = 0;
  u64 residue = 0;
  u64 worst = 0;
  u64 trial = 0;
  u64 candidates = 0;
  VerifyStats verify;

  LargeCaseStats& operator+=(const LargeCaseStats& o) {
    preproducts += o.preproducts;
    easy += o.easy;
    residue += o.residue;
    worst += o.worst;
    trial += o.trial;
    candidates += o.candidates;
    verify += o.verify;
    return *this;
  }
};

/// Divisors t of N with t = R (mod S) and t <= limit, ascending. Scans the class
/// of t up to sqrt(N), then the class of the cofactor N/t from sqrt(N) down.
/// When gcd(R, S) = h > 1 the cofactor class is only known modulo S/h and each
/// hit is re-checked. `visit(t)` returns false to stop early. Returns the number
/// of divisibility tests performed.
template <class Visit>
u64 divisors_in_residue_class(u64 N, u64 R, u64 S, u64 limit, Visit&& visit) {
  if (N == 0 || S == 0) throw std::invalid_argument("divisors_in_residue_class: N and S must be positive");
  u64 tests = 0;
  const u64 root = isqrt(N);
  const u64 r = R % S;

  // t <= sqrt(N), t = R (mod S).
  for (u64 t = r == 0 ? S : r; t <= root && t <= limit; t += S) {
    ++tests;
    if (N % t == 0 && !visit(t)) return tests;
    if (t > ~u64{0} - S) break;
  }
  // t > sqrt(N): its cofactor c = N/t < sqrt(N) (or equal, already covered)
  // satisfies R c = N (mod S).
  if (limit <= root) return tests;
  const u64 h = std::gcd(r, S);
  if ((N % S) % h != 0) return tests;
  const u64 Sh = S / h;
  const auto inv = mod_inverse((r / h) % Sh, Sh);
  const u64 c0 = static_cast<u64>(static_cast<u128>((N % S) / h % Sh) * inv.value_or(0) % Sh);
  if (root == 0) return tests;
  // Largest c <= root with c = c0 (mod Sh), walking down.
  const u64 top = root - ((root % Sh + Sh - c0) % Sh);
  if (top > root || top == 0) return tests;
  for (u64 c = top;; c -= Sh) {
    ++tests;
    if (N % c == 0) {
      const u64 t = N / c;
      if (t > limit) return tests;
      if (c != t && t % S == r && !visit(t)) return tests;
    }
    if (c <= Sh) break;
  }
  return tests;
}

inline std::vector<u64> divisors_in_residue_class(u64 N, u64 R, u64 S, u64 limit) {
  std::vector<u64> out;
  divisors_in_residue_class(N, R, S, limit, [&](u64 t) {
    out.push_back(t);
    return true;
  });
  return out;
}

namespace detail {

// Largest r - 1 allowed by the bound: Pq r < B.
inline u64 max_r_minus_1(const PreproductPQ& pp, const Bound& bound) {
  if (!bound.bounded() || bound.admits(pp.value, pp.value)) return pp.value - 1;
  const u128 b = bound.saturated();
  const u128 rmax = (b - 1) / pp.value;  // Pq r <= B - 1
  return rmax == 0 ? 0 : static_cast<u64>(std::min<u128>(rmax - 1, pp.value - 1));
}

inline void emit(const PreproductPQ& pp, u64 r, const Bound& bound, LargeCaseStats& st,
                 std::vector<CarmichaelRecord>& out) {
  auto verdict = verify_candidate(pp.base, pp.q, r, bound, &st.verify);
  if (auto* rec = std::get_if<CarmichaelRecord>(&verdict)) out.push_back(std::move(*rec));
}

}  // namespace detail

/// Walks r = r* + i lambda(Pq) while r <= Pq and Pq r < B, starting above q.
inline std::vector<CarmichaelRecord> easy_r_search(const PreproductPQ& pp, const Bound& bound,
                                                   LargeCaseStats* stats = nullptr) {
  LargeCaseStats local;
  LargeCaseStats& st = stats ? *stats : local;
  std::vector<CarmichaelRecord> out;
  const u64 rm1_max = detail::max_r_minus_1(pp, bound);
  u64 rm1 = pp.r_star - 1;
  if (rm1 < pp.q) rm1 += (pp.q - rm1 + pp.lambda - 1) / pp.lambda * pp.lambda;
  for (; rm1 <= rm1_max; rm1 += pp.lambda) {
    ++st.candidates;
    if (rm1 > 0 && (pp.value - 1) % rm1 == 0) detail::emit(pp, rm1 + 1, bound, st, out);
    if (rm1 > ~u64{0} - pp.lambda) break;
  }
  return out;
}

/// Balanced trial division: f = 1..k over Pq - 1 with k = ceil(sqrt(Pq/lambda)),
/// then the progression r = r* (mod lambda) for r - 1 < (Pq-1)/k.
inline std::vector<CarmichaelRecord> trial_division_search(const PreproductPQ& pp,
                                                           const Bound& bound = Bound::unbounded(),
                                                           LargeCaseStats* stats = nullptr) {
  LargeCaseStats local;
  LargeCaseStats& st = stats ? *stats : local;
  std::vector<CarmichaelRecord> out;
  const u64 m = pp.value - 1;
  u64 k = isqrt(pp.value / pp.lambda);
  while (static_cast<u128>(k) * k * pp.lambda < pp.value) ++k;
  for (u64 f = 1; f <= k; ++f) {
    ++st.candidates;
    if (m % f != 0) continue;
    const u64 rm1 = m / f;
    if (rm1 % pp.lambda == (pp.r_star - 1) % pp.lambda) detail::emit(pp, rm1 + 1, bound, st, out);
  }
  for (u128 rm1 = pp.r_star - 1; rm1 * k < m; rm1 += pp.lambda) {
    ++st.candidates;
    if (rm1 > 0 && m % static_cast<u64>(rm1) == 0) detail::emit(pp, static_cast<u64>(rm1) + 1, bound, st, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Divisors of Pcal in the class R1 (mod S); r = g t + 1, ascending with an
/// early abort once Pq r reaches B. Requires r* > 1.
inline std::vector<CarmichaelRecord> residue_divisor_search(const PreproductPQ& pp, const Bound& bound,
                                                            LargeCaseStats* stats = nullptr) {
  if (pp.r_star <= 1) throw std::invalid_argument("residue_divisor_search requires r* > 1");
  LargeCaseStats local;
  LargeCaseStats& st = stats ? *stats : local;
  const ResidueProblem rp = make_residue_problem(pp);
  const u64 t_max = detail::max_r_minus_1(pp, bound) / rp.g;
  std::vector<CarmichaelRecord> out;
  st.candidates += divisors_in_residue_class(rp.Pcal, rp.R1, rp.S, t_max, [&](u64 t) {
    detail::emit(pp, rp.g * t + 1, bound, st, out);
    return true;
  });
  return out;
}

/// r* = 1: r = m lambda + 1 over the divisors m of (Pq-1)/lambda, ascending.
inline std::vector<CarmichaelRecord> worst_case_search(const PreproductPQ& pp, const Bound& bound,
                                                       LargeCaseStats* stats = nullptr,
                                                       u64 rho_budget = kDefaultRhoBudget) {
  LargeCaseStats local;
  LargeCaseStats& st = stats ? *stats : local;
  if ((pp.value - 1) % pp.lambda != 0) throw std::invalid_argument("worst_case_search requires r* = 1");
  const u64 W = (pp.value - 1) / pp.lambda;
  const auto f = factor_u64(W, rho_budget);
  if (!f) throw HardInputError(pp.value, pp.lambda, "factoring-budget-exceeded");
  const u64 m_max = detail::max_r_minus_1(pp, bound) / pp.lambda;
  std::vector<CarmichaelRecord> out;
  DivisorStream divisors(*f, m_max);
  while (auto m = divisors.next()) {
    ++st.candidates;
    detail::emit(pp, *m * pp.lambda + 1, bound, st, out);
  }
  return out;
}

enum class LargeMethod {
  Residue,       // easy progression or divisors in residue classes
  TrialDivision  // easy progression or balanced trial division
};

enum class LargeBranch { Easy, Residue, Worst, TrialDivision };

/// The branch complete_preproduct takes: the easy progression when its length
/// min((Pq-1)/lambda, B/(Pq lambda)) is at most 2(floor(sqrt(Pcal)/S) + 1).
inline LargeBranch large_branch(const PreproductPQ& pp, const Bound& bound, LargeMethod method = LargeMethod::Residue) {
  u128 k_easy = (pp.value - 1) / pp.lambda;
  if (bound.bounded()) {
    const u128 pql = static_cast<u128>(pp.value) * pp.lambda;
    k_easy = std::min(k_easy, bound.saturated() / pql);
  }
  const ResidueProblem rp = make_residue_problem(pp);
  const u128 k_res = 2 * (static_cast<u128>(isqrt(rp.Pcal) / rp.S) + 1);
  if (k_easy <= k_res) return LargeBranch::Easy;
  if (method == LargeMethod::TrialDivision) return LargeBranch::TrialDivision;
  return pp.r_star == 1 ? LargeBranch::Worst : LargeBranch::Residue;
}

/// All Carmichael numbers P q r < B for this Pq, sorted by n.
inline std::vector<CarmichaelRecord> complete_preproduct(const PreproductPQ& pp, const Bound& bound,
                                                         LargeCaseStats* stats = nullptr,
                                                         LargeMethod method = LargeMethod::Residue) {
  LargeCaseStats local;
  LargeCaseStats& st = stats ? *stats : local;
  ++st.preproducts;
  std::vector<CarmichaelRecord> out;
  switch (large_branch(pp, bound, method)) {
    case LargeBranch::Easy:
      ++st.easy;
      out = easy_r_search(pp, bound, &st);
      break;
    case LargeBranch::Residue:
      ++st.residue;
      out = residue_divisor_search(pp, bound, &st);
      break;
    case LargeBranch::Worst:
      ++st.worst;
      out = worst_case_search(pp, bound, &st);
      break;
    case LargeBranch::TrialDivision:
      ++st.trial;
      out = trial_division_search(pp, bound, &st);
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace carmtab
