#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "convexlab/energy.hpp"
#include "convexlab/generators.hpp"
#include "convexlab/serialize.hpp"
#include "oracles.hpp"

using namespace convexlab;

namespace {

using Table = std::vector<std::pair<std::int64_t, std::uint64_t>>;

Table table(const RepFunction& r) {
  Table out;
  for (const auto& e : r.entries()) out.emplace_back(e.value, e.count);
  return out;
}

Table table(const oracle::Counts& c) { return {c.begin(), c.end()}; }

std::vector<std::int64_t> elems(const OrderedIntSet& a) { return {a.begin(), a.end()}; }

OrderedIntSet random_set(SplitMix64& rng, int n, std::int64_t span) {
  std::set<std::int64_t> s;
  while (static_cast<int>(s.size()) < n) s.insert(rng.between(-span, span));
  return make_set(std::vector<std::int64_t>(s.begin(), s.end()));
}

const OrderedIntSet kA = make_set({0, 1, 4, 8});

}  // namespace

TEST(DifferenceRep, Examples) {
  EXPECT_EQ(table(difference_rep(kA, kA)),
            (Table{{-8, 1}, {-7, 1}, {-4, 2}, {-3, 1}, {-1, 1}, {0, 4},
                   {1, 1}, {3, 1}, {4, 2}, {7, 1}, {8, 1}}));
  EXPECT_EQ(table(difference_rep(make_set({0, 1}), make_set({5}))), (Table{{-5, 1}, {-4, 1}}));
  EXPECT_EQ(table(difference_rep(make_set({0}), make_set({0}))), (Table{{0, 1}}));
}

TEST(SumRep, Examples) {
  EXPECT_EQ(table(sum_rep(kA, kA)),
            (Table{{0, 1}, {1, 2}, {2, 1}, {4, 2}, {5, 2}, {8, 3}, {9, 2}, {12, 2}, {16, 1}}));
  EXPECT_EQ(table(sum_rep(make_set({0, 1}), make_set({0, 1}))), (Table{{0, 1}, {1, 2}, {2, 1}}));
}

TEST(IteratedSumRep, Examples) {
  EXPECT_EQ(table(iterated_sum_rep(make_set({0, 1}), 4)),
            (Table{{0, 1}, {1, 4}, {2, 6}, {3, 4}, {4, 1}}));
  EXPECT_EQ(table(iterated_sum_rep(make_set({0}), 4)), (Table{{0, 1}}));
  EXPECT_THROW(iterated_sum_rep(kA, 5), Error);
}

TEST(Reps, MatchNaiveTables) {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_set(rng, 1 + static_cast<int>(rng.below(12)), 40);
    const auto b = random_set(rng, 1 + static_cast<int>(rng.below(12)), 40);
    ASSERT_EQ(table(difference_rep(a, b)), table(oracle::differences(elems(a), elems(b))));
    ASSERT_EQ(table(sum_rep(a, b)), table(oracle::sums(elems(a), elems(b))));
    for (int k = 2; k <= 4; ++k) {
      ASSERT_EQ(table(iterated_sum_rep(a, k)), table(oracle::k_fold_sums(elems(a), k)));
    }
  }
}

// Wide sets exercise the sparse merge path; dense spans the histogram path.
TEST(Reps, DenseAndSparsePathsAgree) {
  SplitMix64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_set(rng, 30, 200);
    Budget sparse;
    sparse.dense_span = 0;
    ASSERT_EQ(table(difference_rep(a, a)), table(difference_rep(a, a, sparse)));
    ASSERT_EQ(table(iterated_sum_rep(a, 3)), table(iterated_sum_rep(a, 3, sparse)));
  }
}

TEST(Reps, MassConservationAndSymmetry) {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_set(rng, 1 + static_cast<int>(rng.below(20)), 1000);
    const auto b = random_set(rng, 1 + static_cast<int>(rng.below(20)), 1000);
    ASSERT_TRUE(difference_rep(a, b).total_mass() == static_cast<Wide>(a.size() * b.size()));
    ASSERT_TRUE(sum_rep(a, b).total_mass() == static_cast<Wide>(a.size() * b.size()));
    const auto d = difference_rep(a, a);
    ASSERT_EQ(d(0), a.size());
    for (const auto& e : d.entries()) ASSERT_EQ(d(-e.value), e.count);
  }
}

TEST(Energy, Examples) {
  const auto d = difference_rep(kA, kA);
  EXPECT_TRUE(energy_exact(d, 2) == 32);
  EXPECT_TRUE(energy_exact(d, 3) == 88);
  // 4^{8/3} + 2·2^{8/3} + 8 in long double.
  const long double oracle8_3 = std::pow(4.0L, 8.0L / 3) + 2 * std::pow(2.0L, 8.0L / 3) + 8;
  EXPECT_NEAR(energy(d, 8.0 / 3.0), static_cast<double>(oracle8_3), 1e-9 * oracle8_3);
  EXPECT_NEAR(energy(d, 8.0 / 3.0), 61.017, 5e-4);
  EXPECT_DOUBLE_EQ(energy(d, 2.0), 32.0);
  EXPECT_THROW(energy(d, 0.5), Error);
}

TEST(TEnergy, Examples) {
  EXPECT_TRUE(t_energy(make_set({0, 1}), 4) == 70);
  EXPECT_TRUE(t_energy(kA, 2) == 32);
  for (int k = 2; k <= 4; ++k) EXPECT_TRUE(t_energy(make_set({0}), k) == 1);
}

TEST(CrossEnergy, Examples) {
  const auto b = make_set({-4, 0, 4});
  EXPECT_TRUE(cross_energy(kA, b, 2) == 22);
  EXPECT_TRUE(cross_energy(kA, make_set({0}), 2) == kA.size());
  EXPECT_TRUE(cross_energy(kA, kA, 2) == 32);
  EXPECT_DOUBLE_EQ(cross_energy_fractional(kA, b, 2.0), 22.0);
}

TEST(TripleEnergyWeighted, Examples) {
  EXPECT_TRUE(triple_energy_weighted(kA, make_set({0})) == 16);
  EXPECT_TRUE(triple_energy_weighted(kA, kA) == 88);
}

TEST(BruteForce, Examples) {
  EXPECT_TRUE(brute_force_energy(kA, kA, 2) == 32);
  EXPECT_TRUE(brute_force_t(make_set({0, 1}), 4) == 70);
  EXPECT_TRUE(brute_force_energy(kA, make_set({0}), 2) == kA.size());
}

TEST(BruteForce, AgreesWithNaiveOracle) {
  SplitMix64 rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_set(rng, 1 + static_cast<int>(rng.below(6)), 20);
    const auto b = random_set(rng, 1 + static_cast<int>(rng.below(6)), 20);
    for (int k = 2; k <= 3; ++k) {
      ASSERT_TRUE(brute_force_energy(a, b, k) == oracle::chain_tuples(elems(a), elems(b), k));
    }
    ASSERT_TRUE(brute_force_t(a, 3) == oracle::t_tuples(elems(a), 3));
  }
}

TEST(Budget, Exceeded) {
  Budget tiny;
  tiny.pairs = 10;
  try {
    difference_rep(kA, kA, tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::budget_exceeded);
  }
  EXPECT_THROW(brute_force_t(kA, 4, tiny), Error);
}

TEST(Overflow, DetectedNotWrapped) {
  const Wide big = ~Wide{0};
  try {
    checked_add(big, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::overflow);
  }
  EXPECT_THROW(checked_mul(big, 2), Error);
  EXPECT_TRUE(checked_pow(2, 100) == (Wide{1} << 100));
}

TEST(EnergyProfile, Invariants) {
  SplitMix64 rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_set(rng, 1 + static_cast<int>(rng.below(30)), 500);
    const auto p = energy_profile(a);
    ASSERT_TRUE(p.e2 == p.t2);
    const Wide support = p.difference_support;
    const Wide n2 = static_cast<Wide>(a.size()) * a.size();
    ASSERT_TRUE(p.e3 * p.e3 * support >= p.e2 * p.e2 * p.e2);
    ASSERT_TRUE(p.e3 * n2 >= p.e2 * p.e2);
    const auto d = difference_rep(a, a);
    for (unsigned k : {2u, 3u}) {
      const double exact = to_double(energy_exact(d, k));
      ASSERT_NEAR(energy(d, k), exact, 1e-12 * exact);
    }
    ASSERT_TRUE(p.t4.has_value());
    const auto n = static_cast<Wide>(a.size());
    ASSERT_TRUE(p.e2 >= n * n);
    ASSERT_TRUE(p.e2 <= n * n * n);
  }
}

TEST(EnergyProfile, CauchySchwarzOnPairs) {
  SplitMix64 rng(36);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_set(rng, 1 + static_cast<int>(rng.below(15)), 60);
    const auto b = random_set(rng, 1 + static_cast<int>(rng.below(15)), 60);
    const auto ab = cross_energy(a, b, 2);
    ASSERT_TRUE(ab * ab <= energy_exact(difference_rep(a, a), 2) *
                               energy_exact(difference_rep(b, b), 2));
  }
}

TEST(Energy, SingleKeyRepNormalized) {
  const RepFunction single(RepKind::difference, 2, {{0, 5}});
  double prev = 1e300;
  for (double k : {1.0, 1.5, 2.0, 8.0 / 3.0, 3.0}) {
    const double normalized = energy(single, k) / (5.0 * std::pow(5.0, k - 1));
    EXPECT_LE(normalized, prev + 1e-12);
    prev = normalized;
  }
}

TEST(Serialize, RepUsesStringKeys) {
  const auto j = rep_to_json(difference_rep(make_set({0, 1}), make_set({5})));
  EXPECT_EQ(j.dump(), R"({"-4":1,"-5":1})");
}
