#pragma once

/// Simulated annealing over the Δ²A > 0, Δ³A < 0 class for sets with a
/// small doubling exponent log|A+A| / log|A|.
///
/// States are parameterized by the second differences g (positive,
/// strictly decreasing) and the first gap d0, so every state is a member
/// of the class by construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "convexlab/error.hpp"
#include "convexlab/generators.hpp"
#include "convexlab/ordered_set.hpp"

namespace convexlab {

struct SearchConfig {
  std::int64_t ceiling = 1'000'000;  // upper bound for g entries and d0
  double initial_temperature = 0.1;
  double cooling = 0.999;
  int max_retries = 64;
};

struct SearchState {
  std::vector<std::int64_t> g;
  std::int64_t d0 = 1;
  double score = 0.0;
  std::size_t sumset_size = 0;
  double temperature = 0.1;
  std::uint64_t rng_state = 0;

  std::size_t n() const noexcept { return g.size() + 2; }
  OrderedIntSet set() const { return from_second_differences(g, 0, d0); }

  friend bool operator==(const SearchState&, const SearchState&) = default;
};

inline std::size_t sumset_size(const OrderedIntSet& a) {
  std::vector<std::int64_t> sums;
  sums.reserve(a.size() * (a.size() + 1) / 2);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i; j < a.size(); ++j) sums.push_back(a[i] + a[j]);
  std::sort(sums.begin(), sums.end());
  return static_cast<std::size_t>(std::unique(sums.begin(), sums.end()) - sums.begin());
}

inline double doubling_exponent(std::size_t sumset, std::size_t n) {
  return std::log(static_cast<double>(sumset)) / std::log(static_cast<double>(n));
}

/// Recomputes the integrated set and its score.
inline SearchState scored(SearchState state) {
  state.sumset_size = sumset_size(state.set());
  state.score = doubling_exponent(state.sumset_size, state.n());
  return state;
}

inline bool valid_state(const std::vector<std::int64_t>& g, std::int64_t d0,
                        std::int64_t ceiling) {
  if (d0 < 1 || d0 > ceiling || g.empty()) return false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < 1 || g[i] > ceiling) return false;
    if (i > 0 && g[i] >= g[i - 1]) return false;
  }
  return true;
}

inline SearchState initial_state(std::vector<std::int64_t> g, std::int64_t d0,
                                 std::uint64_t seed, const SearchConfig& config = {}) {
  if (!valid_state(g, d0, config.ceiling)) {
    throw Error(Errc::profile_violation, "initial state outside the Δ²>0, Δ³<0 class");
  }
  SearchState s;
  s.g = std::move(g);
  s.d0 = d0;
  s.temperature = config.initial_temperature;
  s.rng_state = seed;
  return scored(std::move(s));
}

/// A random member of the class: n - 2 distinct values of [1, ceiling]
/// sorted descending, and d0 uniform in [1, ceiling].
inline SearchState random_state(int n, std::uint64_t seed, const SearchConfig& config = {}) {
  if (n < 4) throw Error(Errc::degenerate_input, "search needs n >= 4");
  if (config.ceiling < n - 2) throw Error(Errc::degenerate_input, "ceiling below n - 2");
  SplitMix64 rng(seed);
  std::vector<std::int64_t> g;
  while (static_cast<int>(g.size()) < n - 2) {
    const auto v = rng.between(1, config.ceiling);
    if (std::find(g.begin(), g.end(), v) == g.end()) g.push_back(v);
  }
  std::sort(g.begin(), g.end(), std::greater<>());
  const auto d0 = rng.between(1, config.ceiling);
  return initial_state(std::move(g), d0, rng.state(), config);
}

/// Moves one g entry or d0 by ±1, resampling invalid proposals.
inline SearchState propose_move(const SearchState& state, const SearchConfig& config = {}) {
  SplitMix64 rng(state.rng_state);
  const auto slots = state.g.size() + 1;  // last slot is d0
  for (int attempt = 0; attempt < config.max_retries; ++attempt) {
    const auto slot = rng.below(slots);
    const std::int64_t step = rng.below(2) == 0 ? -1 : 1;
    auto g = state.g;
    auto d0 = state.d0;
    if (slot == state.g.size()) {
      d0 += step;
    } else {
      g[slot] += step;
    }
    if (!valid_state(g, d0, config.ceiling)) continue;
    SearchState next = state;
    next.g = std::move(g);
    next.d0 = d0;
    next.rng_state = rng.state();
    return scored(std::move(next));
  }
  throw Error(Errc::stuck, "no valid move found within " + std::to_string(config.max_retries) +
                               " proposals");
}

struct AnnealResult {
  SearchState best;
  SearchState last;  // resumable: carries temperature and stream position
};

/// Metropolis acceptance exp(-Δscore / T) with geometric cooling. The
/// best state only ever improves, so best.score is non-increasing in steps.
inline AnnealResult anneal(const SearchState& initial, long steps,
                           const SearchConfig& config = {}) {
  SearchState current = initial;
  SearchState best = initial;
  for (long step = 0; step < steps; ++step) {
    SearchState candidate = propose_move(current, config);
    SplitMix64 rng(candidate.rng_state);
    const double delta = candidate.score - current.score;
    const double u = rng.unit();
    candidate.rng_state = rng.state();
    const bool accept =
        delta <= 0.0 || (current.temperature > 0.0 && u < std::exp(-delta / current.temperature));
    if (accept) {
      current = std::move(candidate);
    } else {
      current.rng_state = candidate.rng_state;
    }
    current.temperature *= config.cooling;
    if (current.score < best.score) best = current;
  }
  return {best, current};
}

/// Independent chains, one per seed, each started from random_state.
/// The winner has the lowest score; ties go to the earlier seed.
struct ChainOutcome {
  std::uint64_t seed = 0;
  AnnealResult result;
};

inline std::vector<ChainOutcome> run_chains(
    int n, const std::vector<std::uint64_t>& seeds, long steps, const SearchConfig& config,
    const std::function<void(std::size_t, const std::function<void(std::size_t)>&)>& parallel) {
  std::vector<ChainOutcome> out(seeds.size());
  parallel(seeds.size(), [&](std::size_t i) {
    out[i] = {seeds[i], anneal(random_state(n, seeds[i], config), steps, config)};
  });
  return out;
}

inline const ChainOutcome& best_chain(const std::vector<ChainOutcome>& chains) {
  if (chains.empty()) throw Error(Errc::degenerate_input, "no chains to reduce");
  const ChainOutcome* best = &chains.front();
  for (const auto& c : chains) {
    if (c.result.best.score < best->result.best.score) best = &c;
  }
  return *best;
}

/// Smallest |A+A| over every g strictly decreasing in [1, ceiling] and
/// d0 in [1, ceiling]. Only meant for n <= 5.
inline SearchState exhaustive_minimum(int n, std::int64_t ceiling) {
  if (n < 4 || n > 5) throw Error(Errc::degenerate_input, "exhaustive search covers n in {4,5}");
  std::optional<SearchState> best;
  std::vector<std::int64_t> g(static_cast<std::size_t>(n - 2));
  std::function<void(std::size_t, std::int64_t)> fill = [&](std::size_t pos, std::int64_t below) {
    if (pos == g.size()) {
      for (std::int64_t d0 = 1; d0 <= ceiling; ++d0) {
        SearchState s;
        s.g = g;
        s.d0 = d0;
        s = scored(std::move(s));
        if (!best || s.sumset_size < best->sumset_size) best = std::move(s);
      }
      return;
    }
    for (std::int64_t v = std::min(below - 1, ceiling); v >= 1; --v) {
      g[pos] = v;
      fill(pos + 1, v);
    }
  };
  fill(0, ceiling + 1);
  if (!best) throw Error(Errc::degenerate_input, "empty search grid");
  return *best;
}

}  // namespace convexlab
