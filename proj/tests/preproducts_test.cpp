#include <gtest/gtest.h>

#include <numeric>
#include <set>
#include <tuple>

#include "carmtab/preproducts.hpp"

using namespace carmtab;

namespace {

std::vector<u64> values(const std::vector<Preproduct>& ps) {
  std::vector<u64> out;
  for (const auto& p : ps) out.push_back(p.value);
  return out;
}

using PqKey = std::pair<u64, u64>;  // (P, q)

std::vector<PqKey> large_keys(u64 B, u64 X, Shard shard = {}, std::optional<unsigned> d = std::nullopt) {
  std::vector<PqKey> out;
  large_preproducts(Bound(BigNatural(static_cast<unsigned long>(B))), X, d, shard,
                    [&](const PreproductPQ& pp, unsigned) { out.emplace_back(pp.base.value, pp.q); });
  return out;
}

bool prime_by_trial(u64 n) {
  if (n < 2) return false;
  for (u64 f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

// Independent enumeration: every odd cyclic Pq with q its largest prime,
// P >= X and P q^2 < B, using a smallest-prime-factor table.
std::set<PqKey> brute_large(u64 B, u64 X) {
  const u64 limit = B / 9 + 1;
  std::vector<u32> spf(limit + 1, 0);
  for (u64 i = 2; i <= limit; ++i)
    if (spf[i] == 0)
      for (u64 j = i; j <= limit; j += i)
        if (spf[j] == 0) spf[j] = static_cast<u32>(i);
  std::set<PqKey> out;
  for (u64 P = X | 1; P * 9 < B; P += 2) {
    std::vector<u64> ps;
    bool squarefree = true;
    for (u64 m = P; m > 1; m /= spf[m]) {
      if (!ps.empty() && ps.back() == spf[m]) squarefree = false;
      ps.push_back(spf[m]);
    }
    if (!squarefree) continue;
    for (u64 q = ps.back() + 2; P * q * q < B; q += 2) {
      if (spf[q] != q) continue;
      std::vector<u64> all = ps;
      all.push_back(q);
      bool cyclic = true;
      for (u64 a : all)
        for (u64 b : all)
          if (a != b && (b - 1) % a == 0) cyclic = false;
      if (cyclic) out.emplace(P, q);
    }
  }
  return out;
}

}  // namespace

TEST(SmallPreproducts, Examples) {
  const std::vector<u64> expect{3, 5, 7, 11, 13, 15, 17, 19};
  EXPECT_EQ(values(small_preproducts(20)), expect);
  EXPECT_EQ(values(small_preproducts(22)), expect);
  EXPECT_EQ(values(small_preproducts(4)), (std::vector<u64>{3}));
}

TEST(SmallPreproducts, ExactlyOddCyclicNumbers) {
  constexpr u64 kMax = 100000;
  std::vector<u64> phi(kMax + 1);
  std::iota(phi.begin(), phi.end(), u64{0});
  for (u64 p = 2; p <= kMax; ++p)
    if (phi[p] == p)
      for (u64 m = p; m <= kMax; m += p) phi[m] -= phi[m] / p;
  std::vector<u64> expect;
  for (u64 n = 3; n < kMax; n += 2)
    if (std::gcd(n, phi[n]) == 1) expect.push_back(n);
  const auto got = small_preproducts(kMax);
  EXPECT_EQ(values(got), expect);
  for (const auto& p : got) {
    ASSERT_EQ(p.largest_prime * p.cofactor, p.value);
    ASSERT_EQ(p.lambda, carmichael_lambda(trial_factor(p.value)));
  }
}

TEST(SmallPreproducts, SegmentLengthDoesNotMatter) {
  std::vector<u64> a, b;
  small_preproducts(1000, 50000, [&](const Preproduct& p) { a.push_back(p.value); }, 777);
  small_preproducts(1000, 50000, [&](const Preproduct& p) { b.push_back(p.value); });
  EXPECT_EQ(a, b);
}

TEST(LargePreproducts, P255Example) {
  std::vector<u64> qs;
  for (auto [P, q] : large_keys(1000000, 100))
    if (P == 255) qs.push_back(q);
  EXPECT_EQ(qs, (std::vector<u64>{23, 29, 47, 53, 59}));
  for (auto [P, q] : large_keys(1000000, 100)) EXPECT_NE(P, 105u);
}

TEST(LargePreproducts, MatchesBruteForceEnumeration) {
  for (auto [B, X] : {std::pair<u64, u64>{1000000, 100}, {10000000, 216}, {100000000, 465}, {100000000, 200}}) {
    const auto got = large_keys(B, X);
    const std::set<PqKey> got_set(got.begin(), got.end());
    EXPECT_EQ(got_set.size(), got.size()) << "duplicates at B=" << B;
    EXPECT_EQ(got_set, brute_large(B, X)) << "B=" << B << " X=" << X;
  }
}

TEST(LargePreproducts, EmittedPairsAreAdmissible) {
  const u64 B = 10000000000ull, X = 2155;
  u64 count = 0;
  large_preproducts(Bound(BigNatural(static_cast<unsigned long>(B))), X, std::nullopt, Shard{},
                    [&](const PreproductPQ& pp, unsigned d) {
                      ++count;
                      ASSERT_EQ(pp.factorization.size(), d - 1);
                      ASSERT_TRUE(is_cyclic(pp.factorization));
                      ASSERT_EQ(pp.value % 2, 1u);
                      ASSERT_GT(pp.q, pp.base.largest_prime);
                      ASSERT_EQ(std::gcd(pp.q - 1, pp.base.value), 1u);
                      ASSERT_GE(pp.base.value, X);
                      ASSERT_LT(static_cast<u128>(pp.value) * pp.q, B);
                      ASSERT_EQ(static_cast<u128>(pp.value) * pp.r_star % pp.lambda, 1 % pp.lambda);
                    });
  EXPECT_GT(count, 1000u);
}

TEST(LargePreproducts, CubeBoundHasNoPrimeP) {
  const u64 X = 101, B = X * X * X;
  for (auto [P, q] : large_keys(B, X)) EXPECT_FALSE(prime_by_trial(P)) << P;
  TabulationConfig cfg;
  cfg.bound = BigNatural(static_cast<unsigned long>(B - 1));
  cfg.crossover = X;
  cfg.d = 3;
  EXPECT_EQ(count_preproducts(cfg).count_pq, 0u);
}

TEST(Sharding, FilterSemantics) {
  const auto all = shard_filter(ShardPlan{}, Shard{0, 1});
  for (u64 c = 0; c < 20; ++c) EXPECT_TRUE(all(c));
  const auto f = shard_filter(ShardPlan{}, Shard{2, 4});
  std::vector<u64> hits;
  for (u64 c = 0; c < 15; ++c)
    if (f(c)) hits.push_back(c);
  EXPECT_EQ(hits, (std::vector<u64>{2, 6, 10, 14}));
  EXPECT_EQ(shard_level(3), 1u);
  EXPECT_EQ(shard_level(6), 2u);
  EXPECT_EQ(shard_level(7), 3u);
}

TEST(Sharding, UnionIsUnshardedAndDisjoint) {
  for (u64 B : {100000000ull, 10000000000ull}) {
    const u64 X = default_crossover(BigNatural(static_cast<unsigned long>(B)));
    auto whole = large_keys(B, X);
    std::vector<PqKey> merged;
    for (u64 i = 0; i < 4; ++i) {
      const auto part = large_keys(B, X, Shard{i, 4});
      merged.insert(merged.end(), part.begin(), part.end());
    }
    std::sort(whole.begin(), whole.end());
    std::sort(merged.begin(), merged.end());
    EXPECT_EQ(std::adjacent_find(merged.begin(), merged.end()), merged.end());
    EXPECT_EQ(merged, whole) << B;
  }
}

TEST(CountPreproducts, MatchesEnumerationAndShardsSum) {
  TabulationConfig cfg;
  cfg.bound = BigNatural(1000000);
  cfg.crossover = 100;
  const auto c = count_preproducts(cfg);
  EXPECT_EQ(c.count_pq, brute_large(1000000, 100).size());
  std::set<u64> ps;
  for (auto [P, q] : brute_large(1000000, 100)) ps.insert(P);
  // count_p counts P reached with its factor count fixed; every P with at
  // least one q is among them.
  EXPECT_GE(c.count_p, ps.size());
  u64 sum_p = 0, sum_pq = 0;
  for (u64 i = 0; i < 3; ++i) {
    cfg.shard = Shard{i, 3};
    const auto s = count_preproducts(cfg);
    sum_p += s.count_p;
    sum_pq += s.count_pq;
  }
  EXPECT_EQ(sum_pq, c.count_pq);
  EXPECT_EQ(sum_p, c.count_p);
}

TEST(Config, ParseShardAndCrossover) {
  EXPECT_EQ(parse_shard("2/4"), (Shard{2, 4}));
  EXPECT_THROW(parse_shard("4/4"), std::invalid_argument);
  EXPECT_THROW(parse_shard("x"), std::invalid_argument);
  EXPECT_THROW(parse_shard("1/0"), std::invalid_argument);
  EXPECT_EQ(default_crossover(BigNatural(100000000)), 465u);
  EXPECT_EQ(default_crossover(BigNatural("10000000000")), 2155u);
  EXPECT_EQ(default_crossover(BigNatural("1000000000000")), 10000u);
  EXPECT_EQ(max_factor_count(Bound(BigNatural(100000000))), 7u);
  EXPECT_EQ(max_factor_count(Bound(BigNatural(111546435))), 7u);
  EXPECT_EQ(max_factor_count(Bound(BigNatural(111546436))), 8u);
}
