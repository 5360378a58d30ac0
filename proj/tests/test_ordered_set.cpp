#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "convexlab/ordered_set.hpp"
#include "convexlab/generators.hpp"
#include "oracles.hpp"

using namespace convexlab;

namespace {

std::vector<std::int64_t> elems(const OrderedIntSet& a) { return {a.begin(), a.end()}; }

OrderedIntSet random_set(SplitMix64& rng, int n, std::int64_t span) {
  std::set<std::int64_t> s;
  while (static_cast<int>(s.size()) < n) s.insert(rng.between(-span, span));
  return make_set(std::vector<std::int64_t>(s.begin(), s.end()));
}

}  // namespace

TEST(OrderedIntSet, SortsOnConstruction) {
  EXPECT_EQ(elems(make_set({0, 1, 3})), (std::vector<std::int64_t>{0, 1, 3}));
  EXPECT_EQ(elems(make_set({8, 0, 4, 1})), (std::vector<std::int64_t>{0, 1, 4, 8}));
}

TEST(OrderedIntSet, RejectsDuplicates) {
  try {
    make_set({0, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::duplicate_element);
  }
}

TEST(OrderedIntSet, RejectsValuesOutsideHeadroom) {
  try {
    make_set({0, kElementBound + 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::overflow_risk);
  }
}

TEST(OrderedIntSet, Contains) {
  const auto a = make_set({0, 1, 4, 8});
  EXPECT_TRUE(a.contains(4));
  EXPECT_FALSE(a.contains(5));
}

TEST(Derivative, Examples) {
  const auto a = make_set({0, 1, 4, 8});
  EXPECT_EQ(derivative(a, 1), (std::vector<std::int64_t>{1, 3, 4}));
  EXPECT_EQ(derivative(a, 2), (std::vector<std::int64_t>{2, 1}));
  EXPECT_EQ(derivative(a, 3), (std::vector<std::int64_t>{-1}));
}

TEST(Derivative, OrderTooHigh) {
  try {
    derivative(make_set({0, 1, 4, 8}), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::order_too_high);
  }
}

TEST(Derivative, CompositionLaw) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const auto a = random_set(rng, n, 1000);
    std::vector<std::int64_t> cur = elems(a);
    for (int k = 1; k < n; ++k) {
      cur = oracle::diff(cur);
      ASSERT_EQ(derivative(a, k), cur);
      if (k > 1) ASSERT_EQ(derivative(a, k), forward_difference(derivative(a, k - 1)));
    }
  }
}

TEST(Signature, Examples) {
  const auto s = signature(make_set({0, 1, 4, 8}), 3);
  EXPECT_EQ(s.level_signs,
            (std::vector<Sign>{Sign::strictly_positive, Sign::strictly_positive, Sign::strictly_negative}));
  EXPECT_TRUE(s.in_target_class());

  const auto ap = signature(make_set({0, 1, 2}), 2);
  EXPECT_EQ(ap.level_signs, (std::vector<Sign>{Sign::strictly_positive, Sign::zero}));
  EXPECT_FALSE(ap.is_convex());

  const auto bent = signature(make_set({0, 2, 3}), 2);
  EXPECT_EQ(bent.level_signs, (std::vector<Sign>{Sign::strictly_positive, Sign::strictly_negative}));
  EXPECT_FALSE(bent.is_convex());
}

TEST(Signature, MatchesCachedLevels) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const auto a = random_set(rng, n, 100);
    const auto depth = std::min(4, n - 1);
    const auto sig = signature(a, depth);
    for (int k = 1; k <= depth; ++k) {
      ASSERT_EQ(sig.level(k), classify(derivative(a, k)));
      const auto cached = a.cached_level(k);
      ASSERT_EQ(std::vector<std::int64_t>(cached.begin(), cached.end()), derivative(a, k));
    }
  }
}

TEST(SecondDifferences, Distinct) {
  EXPECT_TRUE(second_differences_distinct(make_set({0, 1, 4, 8})));
  EXPECT_FALSE(second_differences_distinct(make_set({0, 1, 3, 6})));
  SplitMix64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = generate({Family::random_profile, 4 + static_cast<int>(rng.below(8)), rng(), {}});
    EXPECT_TRUE(second_differences_distinct(a));
  }
}

TEST(Sumset, Examples) {
  EXPECT_EQ(elems(sumset(make_set({0, 1, 3}), make_set({0}))), (std::vector<std::int64_t>{0, 1, 3}));
  EXPECT_EQ(elems(sumset(make_set({0, 1, 3}), make_set({0, 1, 3}))),
            (std::vector<std::int64_t>{0, 1, 2, 3, 4, 6}));
  EXPECT_EQ(sumset(make_set({0, 1, 4, 8}), make_set({0, 1, 4, 8})).size(), 9u);
}

TEST(DifferenceSet, Examples) {
  EXPECT_EQ(elems(difference_set(make_set({0}), make_set({0}))), (std::vector<std::int64_t>{0}));
  EXPECT_EQ(elems(difference_set(make_set({0, 1, 4, 8}), make_set({0, 1, 4, 8}))),
            (std::vector<std::int64_t>{-8, -7, -4, -3, -1, 0, 1, 3, 4, 7, 8}));
  EXPECT_EQ(elems(difference_set(make_set({0, 1}), make_set({5}))), (std::vector<std::int64_t>{-5, -4}));
}

TEST(DifferenceSet, SymmetricAndContainsZero) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_set(rng, 1 + static_cast<int>(rng.below(10)), 500);
    const auto d = difference_set(a, a);
    EXPECT_TRUE(d.contains(0));
    for (auto x : d) EXPECT_TRUE(d.contains(-x));
  }
}

// |A+A| >= 2n - 1, with equality exactly for arithmetic progressions.
TEST(Sumset, LowerBoundExhaustiveSmall) {
  for (int n = 1; n <= 5; ++n) {
    std::vector<std::int64_t> a;
    std::function<void(std::int64_t)> rec = [&](std::int64_t next) {
      if (static_cast<int>(a.size()) == n) {
        const auto s = make_set(a);
        const auto size = sumset(s, s).size();
        const auto d = oracle::diff(a);
        const bool ap = std::all_of(d.begin(), d.end(), [&](auto v) { return v == d.front(); });
        ASSERT_GE(size, static_cast<std::size_t>(2 * n - 1));
        ASSERT_EQ(size == static_cast<std::size_t>(2 * n - 1), ap);
        return;
      }
      for (std::int64_t v = next; v <= 9; ++v) {
        a.push_back(v);
        rec(v + 1);
        a.pop_back();
      }
    };
    rec(0);
  }
}

TEST(Transform, TranslateAndDilate) {
  const auto a = make_set({0, 1, 4, 8});
  EXPECT_EQ(elems(translate(a, 3)), (std::vector<std::int64_t>{3, 4, 7, 11}));
  EXPECT_EQ(elems(dilate(a, 2)), (std::vector<std::int64_t>{0, 2, 8, 16}));
}
