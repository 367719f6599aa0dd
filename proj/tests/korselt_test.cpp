#include <gtest/gtest.h>

#include <random>
#include <variant>

#include "carmtab/korselt.hpp"
#include "carmtab/oracle.hpp"

using namespace carmtab;

namespace {

std::vector<BigNatural> big_list(std::initializer_list<unsigned long> xs) {
  std::vector<BigNatural> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

const CarmichaelRecord* record_of(const Verdict& v) { return std::get_if<CarmichaelRecord>(&v); }

std::optional<Stage> stage_of(const Verdict& v) {
  if (auto* r = std::get_if<Rejection>(&v)) return r->stage;
  return std::nullopt;
}

}  // namespace

TEST(KorseltCheck, Examples) {
  EXPECT_TRUE(korselt_check(big_list({3, 11, 17})));
  EXPECT_FALSE(korselt_check(big_list({3, 5, 7})));
  EXPECT_TRUE(korselt_check(big_list({11, 37, 43, 61, 71, 73, 127})));
}

TEST(KorseltCheck, RejectsDegenerateLists) {
  EXPECT_FALSE(korselt_check(big_list({3, 11})));
  EXPECT_FALSE(korselt_check(big_list({3, 3, 11, 17})));
  EXPECT_FALSE(korselt_check(big_list({3, 11, 17, 1})));
  // 561 has the right divisibility shape with a composite "factor".
  EXPECT_FALSE(korselt_check(big_list({7, 13, 19, 561})));
}

TEST(KorseltCheck, LargestExample) {
  const auto primes = std::vector<BigNatural>{BigNatural(69999133), BigNatural("4899878690750821"),
                                              BigNatural("171493630078866294519097")};
  BigNatural n = 1;
  for (const auto& p : primes) n *= p;
  EXPECT_EQ(n.get_str(), "58820130315254068539355808737155820138700871721");
  EXPECT_TRUE(korselt_check(primes));
}

TEST(KorseltCheck, AgreesWithFermatOnOddCompositesToMillion) {
  for (std::uint64_t n = 9; n <= 1000000; n += 2) {
    std::vector<BigNatural> primes;
    std::uint64_t m = n;
    for (std::uint64_t f = 3; f * f <= m; f += 2)
      while (m % f == 0) {
        primes.emplace_back(static_cast<unsigned long>(f));
        m /= f;
      }
    if (m > 1) primes.emplace_back(static_cast<unsigned long>(m));
    if (primes.size() < 2) continue;
    ASSERT_EQ(korselt_check(primes), oracle::fermat_all_bases(n)) << n;
  }
}

TEST(VerifyCandidate, Examples) {
  const auto P3 = make_preproduct(3);
  const auto ok = verify_candidate(P3, 11, 17, Bound::unbounded());
  ASSERT_NE(record_of(ok), nullptr);
  EXPECT_EQ(record_of(ok)->n, 561);
  EXPECT_EQ(record_of(ok)->primes, big_list({3, 11, 17}));

  EXPECT_EQ(stage_of(verify_candidate(P3, 11, 17, Bound(BigNatural(500)))), Stage::Bound);
  EXPECT_EQ(stage_of(verify_candidate(P3, 11, 17, Bound(BigNatural(561)))), Stage::Bound);
  EXPECT_NE(record_of(verify_candidate(P3, 11, 17, Bound(BigNatural(562)))), nullptr);
}

TEST(VerifyCandidate, LargestExample) {
  const auto P = make_preproduct(69999133);
  const auto v = verify_candidate(P, parse_u128("4899878690750821"), parse_u128("171493630078866294519097"),
                                  Bound::unbounded());
  ASSERT_NE(record_of(v), nullptr);
  EXPECT_EQ(record_of(v)->n.get_str(), "58820130315254068539355808737155820138700871721");
  EXPECT_EQ(record_of(v)->d(), 3u);
}

TEST(VerifyCandidate, StageOrdering) {
  const auto P3 = make_preproduct(3);
  VerifyStats st;
  EXPECT_EQ(stage_of(verify_candidate(P3, 3, 17, Bound::unbounded(), &st)), Stage::Ordering);
  EXPECT_EQ(stage_of(verify_candidate(P3, 17, 11, Bound::unbounded(), &st)), Stage::Ordering);
  EXPECT_EQ(stage_of(verify_candidate(P3, 11, 18, Bound::unbounded(), &st)), Stage::Ordering);
  EXPECT_EQ(stage_of(verify_candidate(P3, 11, 21, Bound::unbounded(), &st)), Stage::Ordering);
  EXPECT_EQ(stage_of(verify_candidate(P3, 11, 19, Bound::unbounded(), &st)), Stage::Divisibility);
  EXPECT_EQ(stage_of(verify_candidate(P3, 11, 17, Bound(BigNatural(100)), &st)), Stage::Bound);
  EXPECT_EQ(st.primality_calls, 0u);
  EXPECT_EQ(st.rejected_ordering, 4u);
  EXPECT_EQ(st.rejected_divisibility, 1u);
  EXPECT_EQ(st.rejected_bound, 1u);
}

TEST(VerifyCandidate, PrimalityLast) {
  // 7 * 13 * 19 = 1729 passes; with q = 13 replaced by a composite that keeps
  // the divisibilities, only the primality stage can object.
  const auto P7 = make_preproduct(7);
  VerifyStats st;
  EXPECT_NE(record_of(verify_candidate(P7, 13, 19, Bound::unbounded(), &st)), nullptr);
  EXPECT_EQ(st.primality_calls, 1u);
  // r - 1 must divide 7q - 1, so walking those divisors finds candidates
  // passing every divisibility; some of them have a composite q or r.
  bool found = false;
  for (u64 q = 9; q < 3000 && !found; q += 2) {
    const u64 m = 7 * q - 1;
    for (u64 rm1 = q + 1; rm1 <= m && !found; ++rm1) {
      if (m % rm1 != 0) continue;
      VerifyStats s2;
      const auto v = verify_candidate(P7, q, rm1 + 1, Bound::unbounded(), &s2);
      if (s2.primality_calls == 1 && stage_of(v) == Stage::Primality) found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(VerifyCandidate, AcceptsExactlyKorseltNumbers) {
  std::mt19937_64 rng(3);
  const auto P = make_preproduct(5);
  for (int i = 0; i < 20000; ++i) {
    const u64 q = 7 + 2 * (rng() % 200);
    const u64 r = q + 2 + 2 * (rng() % 20000);
    const auto v = verify_candidate(P, q, r, Bound::unbounded());
    const bool k = korselt_check(std::vector<BigNatural>{BigNatural(5), BigNatural(static_cast<unsigned long>(q)),
                                                         BigNatural(static_cast<unsigned long>(r))});
    ASSERT_EQ(record_of(v) != nullptr, k) << q << " " << r;
  }
}
