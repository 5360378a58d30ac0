#pragma once

/// Finite ordered integer sets, their higher discrete derivatives, and
/// sumset / difference-set construction.
///
/// An OrderedIntSet is immutable once built. Elements are bounded by
/// kElementBound in magnitude so any pairwise sum or difference of two
/// elements is representable in std::int64_t.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convexlab/error.hpp"

namespace convexlab {

inline constexpr std::int64_t kElementBound = std::int64_t{1} << 61;

class OrderedIntSet {
 public:
  /// Sorts `values` ascending. Duplicates and out-of-headroom values throw.
  static OrderedIntSet make(std::vector<std::int64_t> values) {
    if (values.empty()) {
      throw Error(Errc::degenerate_input, "a set needs at least one element");
    }
    for (auto v : values) check_headroom(v);
    std::sort(values.begin(), values.end());
    auto dup = std::adjacent_find(values.begin(), values.end());
    if (dup != values.end()) {
      throw Error(Errc::duplicate_element,
                  "value " + std::to_string(*dup) + " appears more than once");
    }
    return OrderedIntSet(std::move(values));
  }

  std::span<const std::int64_t> elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  std::int64_t front() const noexcept { return elements_.front(); }
  std::int64_t back() const noexcept { return elements_.back(); }
  std::int64_t operator[](std::size_t i) const noexcept { return elements_[i]; }

  auto begin() const noexcept { return elements_.begin(); }
  auto end() const noexcept { return elements_.end(); }

  bool contains(std::int64_t value) const {
    return std::binary_search(elements_.begin(), elements_.end(), value);
  }

  /// Cached forward differences Δ^k for k = 1..min(kCachedLevels, n-1).
  std::span<const std::int64_t> cached_level(int k) const {
    return levels_.at(static_cast<std::size_t>(k - 1));
  }
  int cached_depth() const noexcept { return static_cast<int>(levels_.size()); }

  friend bool operator==(const OrderedIntSet& a, const OrderedIntSet& b) {
    return a.elements_ == b.elements_;
  }

  static constexpr int kCachedLevels = 4;

  static void check_headroom(std::int64_t v) {
    if (v > kElementBound || v < -kElementBound) {
      throw Error(Errc::overflow_risk,
                  "element " + std::to_string(v) + " exceeds the 2^61 magnitude bound");
    }
  }

 private:
  // Caller guarantees: nonempty, strictly increasing, within headroom.
  explicit OrderedIntSet(std::vector<std::int64_t> sorted) : elements_(std::move(sorted)) {
    std::vector<std::int64_t> current = elements_;
    const int depth = std::min<int>(kCachedLevels, static_cast<int>(elements_.size()) - 1);
    for (int k = 1; k <= depth; ++k) {
      std::vector<std::int64_t> next(current.size() - 1);
      for (std::size_t i = 0; i + 1 < current.size(); ++i) {
        next[i] = current[i + 1] - current[i];
      }
      levels_.push_back(next);
      current = std::move(next);
    }
  }

  friend OrderedIntSet from_sorted_unique(std::vector<std::int64_t> sorted);

  std::vector<std::int64_t> elements_;
  std::vector<std::vector<std::int64_t>> levels_;
};

/// Builds a set from values already strictly increasing; only headroom is
/// re-checked.
inline OrderedIntSet from_sorted_unique(std::vector<std::int64_t> sorted) {
  if (sorted.empty()) {
    throw Error(Errc::degenerate_input, "a set needs at least one element");
  }
  for (auto v : sorted) OrderedIntSet::check_headroom(v);
  return OrderedIntSet(std::move(sorted));
}

inline OrderedIntSet make_set(std::vector<std::int64_t> values) {
  return OrderedIntSet::make(std::move(values));
}

inline OrderedIntSet make_set(std::initializer_list<std::int64_t> values) {
  return OrderedIntSet::make(std::vector<std::int64_t>(values));
}

/// One forward-difference step of an arbitrary sequence.
inline std::vector<std::int64_t> forward_difference(std::span<const std::int64_t> seq) {
  std::vector<std::int64_t> out;
  if (seq.size() < 2) return out;
  out.reserve(seq.size() - 1);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) out.push_back(seq[i + 1] - seq[i]);
  return out;
}

/// Δ^k A, of length n - k.
inline std::vector<std::int64_t> derivative(const OrderedIntSet& a, int k) {
  const auto n = static_cast<int>(a.size());
  if (k < 1 || k > n - 1) {
    throw Error(Errc::order_too_high, "derivative order " + std::to_string(k) +
                                          " needs at least " + std::to_string(k + 1) +
                                          " elements, set has " + std::to_string(n));
  }
  if (k <= a.cached_depth()) {
    auto level = a.cached_level(k);
    return {level.begin(), level.end()};
  }
  auto level = a.cached_level(a.cached_depth());
  std::vector<std::int64_t> current(level.begin(), level.end());
  for (int j = a.cached_depth(); j < k; ++j) current = forward_difference(current);
  return current;
}

enum class Sign {
  strictly_positive,
  strictly_negative,
  non_negative,
  non_positive,
  zero,
  mixed,
};

constexpr std::string_view to_string(Sign s) {
  switch (s) {
    case Sign::strictly_positive: return "s-pos";
    case Sign::strictly_negative: return "s-neg";
    case Sign::non_negative: return "non-neg";
    case Sign::non_positive: return "non-pos";
    case Sign::zero: return "zero";
    case Sign::mixed: return "mixed";
  }
  return "mixed";
}

/// Compact glyph used by the CLI: +, -, >=0, <=0, 0, ~.
constexpr std::string_view glyph(Sign s) {
  switch (s) {
    case Sign::strictly_positive: return "+";
    case Sign::strictly_negative: return "-";
    case Sign::non_negative: return ">=0";
    case Sign::non_positive: return "<=0";
    case Sign::zero: return "0";
    case Sign::mixed: return "~";
  }
  return "~";
}

inline Sign classify(std::span<const std::int64_t> seq) {
  bool pos = false, neg = false, zero = false;
  for (auto v : seq) {
    if (v > 0) pos = true;
    else if (v < 0) neg = true;
    else zero = true;
  }
  if (pos && neg) return Sign::mixed;
  if (pos) return zero ? Sign::non_negative : Sign::strictly_positive;
  if (neg) return zero ? Sign::non_positive : Sign::strictly_negative;
  return Sign::zero;
}

/// True when an observed level sign meets a required one, e.g. a
/// strictly negative level satisfies the requirement "<= 0".
constexpr bool satisfies(Sign observed, Sign required) {
  switch (required) {
    case Sign::strictly_positive: return observed == Sign::strictly_positive;
    case Sign::strictly_negative: return observed == Sign::strictly_negative;
    case Sign::zero: return observed == Sign::zero;
    case Sign::non_negative:
      return observed == Sign::strictly_positive || observed == Sign::non_negative ||
             observed == Sign::zero;
    case Sign::non_positive:
      return observed == Sign::strictly_negative || observed == Sign::non_positive ||
             observed == Sign::zero;
    case Sign::mixed: return true;
  }
  return false;
}

struct DerivativeSignature {
  std::vector<Sign> level_signs;  // index 0 holds level 1

  int depth() const noexcept { return static_cast<int>(level_signs.size()); }

  /// Sign of Δ^k; throws when k was not computed.
  Sign level(int k) const {
    if (k < 1 || k > depth()) {
      throw Error(Errc::order_too_high,
                  "signature level " + std::to_string(k) + " not computed");
    }
    return level_signs[static_cast<std::size_t>(k - 1)];
  }

  bool has_level(int k) const noexcept { return k >= 1 && k <= depth(); }

  bool level_is(int k, Sign required) const {
    return has_level(k) && satisfies(level(k), required);
  }

  bool is_convex() const { return level_is(2, Sign::strictly_positive); }

  /// Δ²A > 0 and Δ³A < 0.
  bool in_target_class() const {
    return is_convex() && level_is(3, Sign::strictly_negative);
  }

  friend bool operator==(const DerivativeSignature&, const DerivativeSignature&) = default;
};

inline DerivativeSignature signature(const OrderedIntSet& a, int depth) {
  const auto n = static_cast<int>(a.size());
  if (depth < 1 || depth > n - 1) {
    throw Error(Errc::order_too_high, "signature depth " + std::to_string(depth) +
                                          " exceeds n - 1 = " + std::to_string(n - 1));
  }
  DerivativeSignature sig;
  for (int k = 1; k <= depth; ++k) sig.level_signs.push_back(classify(derivative(a, k)));
  return sig;
}

/// Signature up to min(max_depth, n - 1); empty for singletons.
inline DerivativeSignature available_signature(const OrderedIntSet& a, int max_depth = 4) {
  const int depth = std::min<int>(max_depth, static_cast<int>(a.size()) - 1);
  if (depth < 1) return {};
  return signature(a, depth);
}

inline bool second_differences_distinct(const OrderedIntSet& a) {
  if (a.size() < 3) {
    throw Error(Errc::order_too_high, "second differences need at least 3 elements");
  }
  auto second = derivative(a, 2);
  std::sort(second.begin(), second.end());
  return std::adjacent_find(second.begin(), second.end()) == second.end();
}

namespace detail {

inline OrderedIntSet collect_unique(std::vector<std::int64_t> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return from_sorted_unique(std::move(values));
}

}  // namespace detail

/// A + B = {a + b}.
inline OrderedIntSet sumset(const OrderedIntSet& a, const OrderedIntSet& b) {
  std::vector<std::int64_t> values;
  values.reserve(a.size() * b.size());
  for (auto x : a)
    for (auto y : b) values.push_back(x + y);
  return detail::collect_unique(std::move(values));
}

/// A - B = {a - b}.
inline OrderedIntSet difference_set(const OrderedIntSet& a, const OrderedIntSet& b) {
  std::vector<std::int64_t> values;
  values.reserve(a.size() * b.size());
  for (auto x : a)
    for (auto y : b) values.push_back(x - y);
  return detail::collect_unique(std::move(values));
}

/// A + c.
inline OrderedIntSet translate(const OrderedIntSet& a, std::int64_t shift) {
  OrderedIntSet::check_headroom(shift);
  std::vector<std::int64_t> values(a.begin(), a.end());
  for (auto& v : values) v += shift;
  return from_sorted_unique(std::move(values));
}

/// d * A for d >= 1.
inline OrderedIntSet dilate(const OrderedIntSet& a, std::int64_t factor) {
  if (factor < 1) throw Error(Errc::degenerate_input, "dilation factor must be >= 1");
  std::vector<std::int64_t> values(a.begin(), a.end());
  for (auto& v : values) {
    std::int64_t out;
    if (__builtin_mul_overflow(v, factor, &out)) {
      throw Error(Errc::overflow_risk, "dilated element overflows");
    }
    v = out;
  }
  return from_sorted_unique(std::move(values));
}

}  // namespace convexlab
