#include <gtest/gtest.h>

#include <cmath>

#include "convexlab/search.hpp"
#include "convexlab/serialize.hpp"
#include "convexlab/suite.hpp"
#include "oracles.hpp"

using namespace convexlab;

namespace {

std::vector<std::int64_t> elems(const OrderedIntSet& a) { return {a.begin(), a.end()}; }

SearchConfig small_grid() {
  SearchConfig c;
  c.ceiling = 10;
  return c;
}

}  // namespace

TEST(Search, ScoreOfKnownState) {
  const auto s = initial_state({2, 1}, 2, 0);
  EXPECT_EQ(elems(s.set()), (std::vector<std::int64_t>{0, 2, 6, 11}));
  EXPECT_EQ(s.sumset_size, 10u);
  EXPECT_DOUBLE_EQ(s.score, std::log(10.0) / std::log(4.0));
}

TEST(Search, InvalidInitialState) {
  EXPECT_THROW(initial_state({1, 1}, 1, 0), Error);
  EXPECT_THROW(initial_state({2, 1}, 0, 0), Error);
}

TEST(Search, MovesStayInClass) {
  auto s = random_state(8, 3);
  for (int i = 0; i < 2000; ++i) {
    s = propose_move(s);
    ASSERT_TRUE(valid_state(s.g, s.d0, SearchConfig{}.ceiling));
    ASSERT_TRUE(oracle::convex_concave_third(elems(s.set())));
    ASSERT_EQ(s.sumset_size, oracle::sumset_size(elems(s.set())));
  }
}

TEST(Search, StuckWhenNoMoveExists) {
  // Ceiling 1 with g = [1] and d0 = 1: every ±1 step leaves the grid.
  SearchConfig c;
  c.ceiling = 1;
  c.max_retries = 16;
  const auto s = initial_state({1}, 1, 5, c);
  try {
    propose_move(s, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::stuck);
  }
}

TEST(Search, ZeroStepsReturnsInitial) {
  const auto s = random_state(6, 1);
  const auto r = anneal(s, 0);
  EXPECT_EQ(r.best, s);
  EXPECT_EQ(r.last, s);
}

TEST(Search, Deterministic) {
  const auto a = anneal(random_state(7, 42), 500);
  const auto b = anneal(random_state(7, 42), 500);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.last, b.last);
}

TEST(Search, BestIsMonotoneInSteps) {
  const auto s = random_state(7, 9);
  double prev = s.score;
  for (long steps : {10L, 50L, 200L, 1000L}) {
    const auto r = anneal(s, steps);
    EXPECT_LE(r.best.score, prev);
    prev = r.best.score;
  }
}

TEST(Search, ResumeEqualsUninterrupted) {
  const auto s = random_state(6, 17);
  const auto whole = anneal(s, 600);
  const auto first = anneal(s, 250);
  const auto restored = search_state_from_json(search_state_to_json(first.last));
  auto second = anneal(restored, 350);
  if (first.best.score <= second.best.score) second.best = first.best;
  EXPECT_EQ(second.last, whole.last);
  EXPECT_EQ(second.best.score, whole.best.score);
}

TEST(Search, ScoreRespectsTrivialLowerBound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = anneal(random_state(9, seed), 300);
    EXPECT_GE(r.best.score, std::log(17.0) / std::log(9.0));
  }
}

TEST(Search, ExhaustiveAgreesWithElementOracle) {
  for (int n : {4, 5}) {
    const std::int64_t ceiling = n == 4 ? 10 : 6;
    EXPECT_EQ(exhaustive_minimum(n, ceiling).sumset_size, oracle::min_sumset_by_elements(n, ceiling))
        << n;
  }
  EXPECT_EQ(exhaustive_minimum(4, 10).sumset_size, 9u);
}

TEST(Search, AnnealingFindsMinimumAtFour) {
  const auto c = small_grid();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = anneal(random_state(4, seed, c), 1000, c);
    EXPECT_EQ(r.best.sumset_size, 9u) << seed;
    EXPECT_DOUBLE_EQ(r.best.score, std::log(9.0) / std::log(4.0));
  }
}

TEST(Search, ChainsReduceByScoreThenSeed) {
  const auto chains = run_chains(6, {5, 6, 7, 8}, 300, {}, sequential_for);
  ASSERT_EQ(chains.size(), 4u);
  const auto& best = best_chain(chains);
  for (const auto& c : chains) {
    EXPECT_GE(c.result.best.score, best.result.best.score);
    if (c.result.best.score == best.result.best.score) EXPECT_GE(c.seed, best.seed);
  }
}
