#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "carmtab/oracle.hpp"
#include "carmtab/preproducts.hpp"
#include "carmtab/smallcase.hpp"

using namespace carmtab;

namespace {

std::vector<std::string> ns(const std::vector<CarmichaelRecord>& recs) {
  std::vector<std::string> out;
  for (const auto& r : recs) out.push_back(r.n.get_str());
  return out;
}

// Product of all but the two largest primes of a record.
u64 preproduct_of(const CarmichaelRecord& r) {
  u64 P = 1;
  for (std::size_t i = 0; i + 2 < r.primes.size(); ++i) P *= r.primes[i].get_ui();
  return P;
}

const oracle::OracleResult& oracle_1e8() {
  static const auto result = oracle::brute_force_tabulate(100000000);
  return result;
}

std::vector<std::string> oracle_with_preproduct(u64 P, u64 limit) {
  std::vector<std::string> out;
  for (const auto& r : oracle_1e8().records)
    if (r.n < limit && preproduct_of(r) == P) out.push_back(r.n.get_str());
  return out;
}

struct AllMethods {
  std::vector<CarmichaelRecord> cd, dd, hy;
};

AllMethods all_methods(const Preproduct& pre, const Bound& b, const SmallCaseOptions& opts = {}) {
  return {cd_completions(pre, b), ddelta_completions(pre, b, nullptr, opts), hybrid_completions(pre, b, nullptr, opts)};
}

}  // namespace

TEST(SmallCase, PreproductThree) {
  const auto m = all_methods(make_preproduct(3), Bound::unbounded());
  const std::vector<std::string> expect{"561"};
  EXPECT_EQ(ns(m.cd), expect);
  EXPECT_EQ(ns(m.dd), expect);
  EXPECT_EQ(ns(m.hy), expect);
  ASSERT_EQ(m.cd.size(), 1u);
  EXPECT_EQ(m.cd[0].primes, (std::vector<BigNatural>{3, 11, 17}));
}

TEST(SmallCase, PreproductFiveMatchesOracle) {
  const auto expect = oracle_with_preproduct(5, 100000000);
  EXPECT_EQ(expect, (std::vector<std::string>{"1105", "2465", "10585"}));
  const auto m = all_methods(make_preproduct(5), Bound::unbounded());
  EXPECT_EQ(ns(m.cd), expect);
  EXPECT_EQ(ns(m.dd), expect);
  EXPECT_EQ(ns(m.hy), expect);
}

TEST(SmallCase, BoundedExamples) {
  EXPECT_TRUE(cd_completions(make_preproduct(3), Bound(BigNatural(500))).empty());
  EXPECT_TRUE(hybrid_completions(make_preproduct(3), Bound(BigNatural(500))).empty());
  const auto expect = oracle_with_preproduct(5, 2000);
  EXPECT_EQ(expect, (std::vector<std::string>{"1105"}));
  const auto m = all_methods(make_preproduct(5), Bound(BigNatural(2000)));
  EXPECT_EQ(ns(m.cd), expect);
  EXPECT_EQ(ns(m.dd), expect);
  EXPECT_EQ(ns(m.hy), expect);
}

// Unbounded outputs satisfy n < 2 P^6, so the 1e8 oracle covers every P up to 17.
TEST(SmallCase, UnboundedMatchesOracleForTinyP) {
  for (const auto& pre : small_preproducts(18)) {
    const auto expect = oracle_with_preproduct(pre.value, 100000000);
    const auto m = all_methods(pre, Bound::unbounded());
    EXPECT_EQ(ns(m.cd), expect) << pre.value;
    EXPECT_EQ(ns(m.dd), expect) << pre.value;
    EXPECT_EQ(ns(m.hy), expect) << pre.value;
  }
}

TEST(SmallCase, BoundedUnionMatchesOracle) {
  const u64 B = 10000000;
  std::set<std::string> got, expect;
  for (const auto& pre : small_preproducts(216))
    for (const auto& r : hybrid_completions(pre, Bound(BigNatural(static_cast<unsigned long>(B)))))
      got.insert(r.n.get_str());
  for (const auto& r : oracle_1e8().records)
    if (r.n < B && preproduct_of(r) < 216) expect.insert(r.n.get_str());
  EXPECT_EQ(got, expect);
}

TEST(SmallCase, MethodsAgreeUnboundedUpTo3000) {
  for (const auto& pre : small_preproducts(3000)) {
    const auto m = all_methods(pre, Bound::unbounded());
    ASSERT_EQ(ns(m.cd), ns(m.dd)) << pre.value;
    ASSERT_EQ(ns(m.hy), ns(m.dd)) << pre.value;
  }
}

TEST(SmallCase, MethodsAgreeBounded) {
  const Bound b(BigNatural("1000000000000"));
  for (const auto& pre : small_preproducts(2000)) {
    const auto m = all_methods(pre, b);
    ASSERT_EQ(ns(m.cd), ns(m.dd)) << pre.value;
    ASSERT_EQ(ns(m.hy), ns(m.dd)) << pre.value;
    for (const auto& r : m.hy) ASSERT_TRUE(b.admits(r.n));
  }
}

TEST(SmallCase, MethodsAgreeOnRandomLargerP) {
  std::mt19937_64 rng(41);
  int done = 0;
  while (done < 12) {
    const u64 P = 100001 + 2 * (rng() % 450000);
    const auto f = trial_factor(P);
    const auto pre = make_preproduct(f);
    if (!pre) continue;
    ++done;
    const auto m = all_methods(*pre, Bound::unbounded());
    ASSERT_EQ(ns(m.cd), ns(m.dd)) << P;
    ASSERT_EQ(ns(m.hy), ns(m.dd)) << P;
  }
}

TEST(SmallCase, FiltersNeverChangeOutput) {
  SmallCaseOptions off;
  off.parity_filter = false;
  off.residue_filter = false;
  SmallCaseOptions parity_only = off, residue_only = off;
  parity_only.parity_filter = true;
  residue_only.residue_filter = true;
  for (const auto& pre : small_preproducts(10001)) {
    const auto on = ns(ddelta_completions(pre, Bound::unbounded()));
    ASSERT_EQ(ns(ddelta_completions(pre, Bound::unbounded(), nullptr, off)), on) << pre.value;
    if (pre.value < 3000) {
      ASSERT_EQ(ns(ddelta_completions(pre, Bound::unbounded(), nullptr, parity_only)), on) << pre.value;
      ASSERT_EQ(ns(ddelta_completions(pre, Bound::unbounded(), nullptr, residue_only)), on) << pre.value;
    }
  }
}

TEST(SmallCase, SharedSieveGivesSameOutput) {
  const FactorSieve shared(999, 4000);
  for (u64 P = 1001; P < 2000; P += 2) {
    const auto pre = make_preproduct(trial_factor(P));
    if (!pre) continue;
    ASSERT_EQ(ns(hybrid_completions(*pre, Bound::unbounded(), &shared)),
              ns(hybrid_completions(*pre, Bound::unbounded())))
        << P;
  }
}

// D = (Pq-1)/(r-1), C = (Pr-1)/(q-1), Delta = CD - P^2.
TEST(SmallCase, RecordsSatisfyStructuralBounds) {
  for (const auto& pre : small_preproducts(1500)) {
    const u64 P = pre.value;
    for (const auto& rec : hybrid_completions(pre, Bound::unbounded())) {
      ASSERT_TRUE(korselt_check(rec));
      const BigNatural q = rec.primes[rec.d() - 2], r = rec.primes[rec.d() - 1];
      const BigNatural BP(static_cast<unsigned long>(P));
      ASSERT_LT(q, 2 * BP * BP);
      ASSERT_LT(r, BP * BP * BP);
      ASSERT_EQ((BP * q - 1) % (r - 1), 0);
      ASSERT_EQ((BP * r - 1) % (q - 1), 0);
      const BigNatural D = (BP * q - 1) / (r - 1), C = (BP * r - 1) / (q - 1);
      const BigNatural delta = C * D - BP * BP;
      ASSERT_GT(delta, 0);
      ASSERT_GE(D, 2);
      ASSERT_LT(D, BP);
      ASSERT_GT(C, BP);
      ASSERT_EQ(((BP - 1) * (BP + D)) % delta, 0);
      ASSERT_EQ(((BP - 1) * (BP + C)) % delta, 0);
      ASSERT_EQ(q, (BP - 1) * (BP + D) / delta + 1);
      ASSERT_EQ(r, (BP - 1) * (BP + C) / delta + 1);
    }
  }
}

TEST(SmallCase, CandidateCountIsExact) {
  for (u64 P : {3ull, 5ull, 15ull, 101ull, 255ull, 1001ull}) {
    const auto pre = make_preproduct(P);
    const u64 p = pre.largest_prime;
    for (u64 D = 2; D < P; ++D) {
      u64 count = 0;
      for (u64 C = P + 1; C * D * (p + 1) < P * P * (p + 3); ++C)
        if (C * D > P * P) ++count;
      ASSERT_EQ(cd_candidate_count(pre, D), count) << P << " " << D;
    }
  }
}

TEST(SmallCase, DDeltaPairsWithinDivisorCountSum) {
  for (u64 P : {101ull, 255ull, 1001ull, 4999ull}) {
    const auto pre = make_preproduct(P);
    SmallCaseStats st;
    ddelta_completions(pre, Bound::unbounded(), nullptr, {}, &st);
    u64 sum = 0;
    for (u64 D = 2; D < P; ++D) sum += tau(trial_factor(P - 1) * trial_factor(P + D));
    EXPECT_LE(st.ddelta_pairs, sum) << P;
    EXPECT_EQ(st.d_values, P - 2);
  }
}

TEST(Hybrid, RuleAndTies) {
  EXPECT_EQ(hybrid_choice(10, 10), InnerLoop::DDelta);
  EXPECT_EQ(hybrid_choice(10, 9), InnerLoop::DDelta);
  EXPECT_EQ(hybrid_choice(10, 11), InnerLoop::CD);
}

TEST(Hybrid, LargestExampleChoosesDDelta) {
  const auto pre = make_preproduct(69999133);
  EXPECT_EQ(ddelta_divisor_count(pre, 2), 768u);
  EXPECT_GT(cd_candidate_count(pre, 2), 60000000u);
  EXPECT_EQ(hybrid_choice_for(pre, 2), InnerLoop::DDelta);
}

// Near D = P the C interval is short, so the C scan must win somewhere.
TEST(Hybrid, ChoiceFollowsCountRule) {
  int cd_choices = 0;
  for (u64 P : {1009ull, 7919ull, 65537ull}) {
    const auto pp = make_preproduct(P);
    for (u64 D = P - 20; D < P; ++D) {
      const InnerLoop expect = hybrid_choice(cd_candidate_count(pp, D), ddelta_divisor_count(pp, D));
      ASSERT_EQ(hybrid_choice_for(pp, D), expect);
      cd_choices += expect == InnerLoop::CD;
    }
  }
  EXPECT_GT(cd_choices, 0);
}
