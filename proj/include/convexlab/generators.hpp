#pragma once

/// Deterministic constructors for convex sets with prescribed signs of
/// the second, third and fourth discrete derivatives.
///
/// Every generator verifies the signature of the set it builds before
/// returning it. Randomized families draw from SplitMix64, so a
/// (spec, seed) pair always yields the same set on every platform.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convexlab/error.hpp"
#include "convexlab/ordered_set.hpp"

namespace convexlab {

/// SplitMix64 (Steele, Lea, Flood 2014). Small state, splittable, and
/// its output sequence is fully specified, unlike the std distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Independent child stream; advances this stream by one draw.
  SplitMix64 split() noexcept { return SplitMix64(mix((*this)() ^ 0xd1b54a32d192ed03ULL)); }

  /// Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(below(span));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double unit() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t state() const noexcept { return state_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

enum class Family { from_second_differences, power_law, random_profile, minimal_profile };

constexpr std::string_view to_string(Family f) {
  switch (f) {
    case Family::from_second_differences: return "from-second-differences";
    case Family::power_law: return "power-law";
    case Family::random_profile: return "random-profile";
    case Family::minimal_profile: return "minimal-profile";
  }
  return "unknown";
}

inline std::optional<Family> parse_family(std::string_view name) {
  for (auto f : {Family::from_second_differences, Family::power_law, Family::random_profile,
                 Family::minimal_profile}) {
    if (name == to_string(f)) return f;
  }
  if (name == "minimal") return Family::minimal_profile;
  if (name == "power") return Family::power_law;
  if (name == "random") return Family::random_profile;
  return std::nullopt;
}

/// Derivative-sign profiles random_profile can realize.
enum class Profile {
  convex,         // Δ² > 0
  concave_third,  // Δ² > 0, Δ³ < 0
  concave_fourth  // Δ² > 0, Δ³ < 0, Δ⁴ <= 0
};

constexpr std::string_view to_string(Profile p) {
  switch (p) {
    case Profile::convex: return "d2+";
    case Profile::concave_third: return "d2+d3-";
    case Profile::concave_fourth: return "d2+d3-d4<=0";
  }
  return "unknown";
}

inline std::optional<Profile> parse_profile(std::string_view name) {
  for (auto p : {Profile::convex, Profile::concave_third, Profile::concave_fourth}) {
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

/// Deepest derivative level a profile constrains.
constexpr int profile_depth(Profile p) {
  switch (p) {
    case Profile::convex: return 2;
    case Profile::concave_third: return 3;
    case Profile::concave_fourth: return 4;
  }
  return 2;
}

inline bool meets_profile(const DerivativeSignature& sig, Profile p) {
  switch (p) {
    case Profile::convex: return sig.is_convex();
    case Profile::concave_third: return sig.in_target_class();
    case Profile::concave_fourth:
      return sig.in_target_class() && sig.level_is(4, Sign::non_positive);
  }
  return false;
}

struct GeneratorParams {
  double alpha = 1.5;
  double scale = 1.0;
  std::int64_t d0 = 1;
  std::int64_t a0 = 0;
  std::int64_t max_step = 4;  // magnitude range sampled by random_profile
  Profile profile = Profile::concave_third;
  std::vector<std::int64_t> second_differences;  // from-second-differences only

  friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

struct GeneratorSpec {
  Family family = Family::minimal_profile;
  int n = 4;
  std::uint64_t seed = 0;
  GeneratorParams params;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

namespace detail {

inline std::int64_t add_in_headroom(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out) || out > kElementBound || out < -kElementBound) {
    throw Error(Errc::profile_violation, "integrated profile leaves the element headroom");
  }
  return out;
}

inline void require_target_signature(const OrderedIntSet& set, Profile p) {
  const int depth = std::min<int>(profile_depth(p), static_cast<int>(set.size()) - 1);
  if (depth < 1) return;
  const auto sig = signature(set, depth);
  bool ok = sig.level_is(2, Sign::strictly_positive) || depth < 2;
  if (p != Profile::convex && depth >= 3) ok = ok && sig.level_is(3, Sign::strictly_negative);
  if (p == Profile::concave_fourth && depth >= 4) ok = ok && sig.level_is(4, Sign::non_positive);
  if (!ok) throw Error(Errc::profile_violation, "generated set misses its derivative profile");
}

}  // namespace detail

/// Integrates a derivative sequence back to elements. `starts[j]` is the
/// first entry of level j (starts[0] = a0, starts[1] = first gap, ...);
/// `deepest` is level starts.size(). The result has
/// deepest.size() + starts.size() elements.
inline OrderedIntSet integrate(const std::vector<std::int64_t>& deepest,
                               const std::vector<std::int64_t>& starts) {
  std::vector<std::int64_t> level = deepest;
  for (auto it = starts.rbegin(); it != starts.rend(); ++it) {
    std::vector<std::int64_t> lower;
    lower.reserve(level.size() + 1);
    lower.push_back(*it);
    for (auto step : level) lower.push_back(detail::add_in_headroom(lower.back(), step));
    level = std::move(lower);
  }
  return OrderedIntSet::make(std::move(level));
}

/// A with Δ²A = g, first gap d0, first element a0. g must be positive and
/// strictly decreasing, which puts A in the Δ²A > 0, Δ³A < 0 class.
inline OrderedIntSet from_second_differences(const std::vector<std::int64_t>& g,
                                             std::int64_t a0, std::int64_t d0) {
  if (d0 < 1) throw Error(Errc::profile_violation, "first gap d0 must be >= 1");
  if (g.empty()) throw Error(Errc::profile_violation, "second differences must be nonempty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] <= 0) throw Error(Errc::profile_violation, "second differences must be positive");
    if (i > 0 && g[i] >= g[i - 1]) {
      throw Error(Errc::profile_violation, "second differences must be strictly decreasing");
    }
  }
  auto set = integrate(g, {a0, d0});
  detail::require_target_signature(set, Profile::concave_third);
  return set;
}

/// Δ²A = [n-2, n-3, ..., 1], d0 = 1, a0 = 0.
inline OrderedIntSet minimal_profile(int n) {
  if (n < 4) throw Error(Errc::degenerate_input, "minimal_profile needs n >= 4");
  std::vector<std::int64_t> g;
  for (int v = n - 2; v >= 1; --v) g.push_back(v);
  return from_second_differences(g, 0, 1);
}

inline constexpr int kPowerLawRetries = 10;

/// a_i = round(scale * i^alpha), i = 1..n, doubling the scale until the
/// rounded set has Δ² > 0 and Δ³ < 0.
inline OrderedIntSet power_law(int n, double alpha, double scale) {
  if (n < 4) throw Error(Errc::degenerate_input, "power_law needs n >= 4");
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw Error(Errc::degenerate_input, "power_law needs alpha in (1, 2)");
  }
  if (!(scale > 0.0)) throw Error(Errc::degenerate_input, "power_law needs scale > 0");
  for (int attempt = 0; attempt <= kPowerLawRetries; ++attempt, scale *= 2.0) {
    std::vector<std::int64_t> values(static_cast<std::size_t>(n));
    bool representable = true;
    for (int i = 1; i <= n; ++i) {
      const double v = std::round(scale * std::pow(static_cast<double>(i), alpha));
      if (!(v < static_cast<double>(kElementBound))) {
        representable = false;
        break;
      }
      values[static_cast<std::size_t>(i - 1)] = static_cast<std::int64_t>(v);
    }
    if (!representable) break;
    // Rounding can collide neighbours at tiny scales.
    if (std::adjacent_find(values.begin(), values.end(),
                           [](auto x, auto y) { return x >= y; }) != values.end()) {
      continue;
    }
    auto set = from_sorted_unique(std::move(values));
    if (signature(set, 3).in_target_class()) return set;
  }
  throw Error(Errc::repair_failure, "power_law rounding still violates Δ²>0, Δ³<0 after " +
                                        std::to_string(kPowerLawRetries) +
                                        " scale doublings");
}

/// Samples the deepest constrained level of `params.profile` from the
/// seeded stream and integrates down to elements.
inline OrderedIntSet random_profile(int n, std::uint64_t seed, const GeneratorParams& params) {
  const int depth = profile_depth(params.profile);
  if (n < depth + 1) {
    throw Error(Errc::degenerate_input, "profile " + std::string(to_string(params.profile)) +
                                            " needs n >= " + std::to_string(depth + 1));
  }
  if (params.max_step < 1) throw Error(Errc::degenerate_input, "max_step must be >= 1");
  if (params.d0 < 1) throw Error(Errc::profile_violation, "first gap d0 must be >= 1");
  SplitMix64 rng(seed);
  const auto m = params.max_step;
  const auto len = static_cast<std::size_t>(n - depth);
  std::vector<std::int64_t> deepest(len);
  std::vector<std::int64_t> starts{params.a0, params.d0};

  auto total_drop = [](const std::vector<std::int64_t>& seq) {
    std::int64_t s = 0;
    for (auto v : seq) s = detail::add_in_headroom(s, -v);
    return s;
  };

  switch (params.profile) {
    case Profile::convex:
      for (auto& v : deepest) v = rng.between(1, m);
      break;
    case Profile::concave_third: {
      for (auto& v : deepest) v = rng.between(-m, -1);
      // Δ² must stay >= 1 after falling by Σ|Δ³|.
      starts.push_back(detail::add_in_headroom(1 + total_drop(deepest), rng.between(0, m - 1)));
      break;
    }
    case Profile::concave_fourth: {
      for (auto& v : deepest) v = rng.between(-m, 0);
      const std::int64_t third_start = rng.between(-m, -1);
      // Reconstruct Δ³ to size the Δ² start.
      std::vector<std::int64_t> third{third_start};
      for (auto v : deepest) third.push_back(detail::add_in_headroom(third.back(), v));
      const auto second_start =
          detail::add_in_headroom(1 + total_drop(third), rng.between(0, m - 1));
      starts.push_back(second_start);
      starts.push_back(third_start);
      break;
    }
  }
  auto set = integrate(deepest, starts);
  detail::require_target_signature(set, params.profile);
  return set;
}

inline void validate(const GeneratorSpec& spec) {
  switch (spec.family) {
    case Family::from_second_differences: {
      const auto& g = spec.params.second_differences;
      if (g.empty()) throw Error(Errc::config, "from-second-differences needs params.g");
      if (spec.n != static_cast<int>(g.size()) + 2) {
        throw Error(Errc::config, "n must equal len(g) + 2 for from-second-differences");
      }
      break;
    }
    case Family::power_law:
      if (spec.n < 4) throw Error(Errc::config, "power-law needs n >= 4");
      if (!(spec.params.alpha > 1.0 && spec.params.alpha < 2.0)) {
        throw Error(Errc::config, "power-law needs alpha in (1, 2)");
      }
      if (!(spec.params.scale > 0.0)) throw Error(Errc::config, "power-law needs scale > 0");
      break;
    case Family::random_profile:
      if (spec.n < profile_depth(spec.params.profile) + 1) {
        throw Error(Errc::config, "random-profile n too small for its profile");
      }
      break;
    case Family::minimal_profile:
      if (spec.n < 4) throw Error(Errc::config, "minimal-profile needs n >= 4");
      break;
  }
}

inline OrderedIntSet generate(const GeneratorSpec& spec) {
  switch (spec.family) {
    case Family::from_second_differences:
      return from_second_differences(spec.params.second_differences, spec.params.a0,
                                     spec.params.d0);
    case Family::power_law: return power_law(spec.n, spec.params.alpha, spec.params.scale);
    case Family::random_profile: return random_profile(spec.n, spec.seed, spec.params);
    case Family::minimal_profile: return minimal_profile(spec.n);
  }
  throw Error(Errc::config, "unknown family");
}

/// Stable identifier for a generated set, used in every report row.
inline std::string set_id(const GeneratorSpec& spec) {
  std::string id = std::string(to_string(spec.family)) + "/n" + std::to_string(spec.n);
  if (spec.family == Family::random_profile) {
    id += "/" + std::string(to_string(spec.params.profile)) + "/s" + std::to_string(spec.seed);
  }
  return id;
}

}  // namespace convexlab
