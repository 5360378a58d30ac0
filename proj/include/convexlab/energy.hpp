#pragma once

/// Representation functions (difference / sum convolutions of indicator
/// functions), additive energies E_k, iterated T-energies, and the
/// brute-force tuple counters that serve as their independent oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "convexlab/error.hpp"
#include "convexlab/ordered_set.hpp"
#include "convexlab/wide_int.hpp"

namespace convexlab {

/// Work limits. Pair and tuple enumerations above `pairs` raise
/// Errc::budget_exceeded instead of running for hours.
struct Budget {
  std::uint64_t pairs = 100'000'000;
  std::uint64_t matrix = 10'000'000;
  // Dense histogram path is used when the value span is at most this.
  std::uint64_t dense_span = std::uint64_t{1} << 24;
};

inline void require_budget(Wide work, std::uint64_t limit, const char* what) {
  if (work > limit) {
    throw Error(Errc::budget_exceeded, std::string(what) + " needs " + to_string(work) +
                                           " operations, budget is " + std::to_string(limit));
  }
}

enum class RepKind { difference, sum, iterated_sum };

struct RepEntry {
  std::int64_t value;
  std::uint64_t count;
  friend bool operator==(const RepEntry&, const RepEntry&) = default;
};

/// Count table keyed by integer value, sorted by key, every count >= 1.
class RepFunction {
 public:
  RepFunction() = default;
  RepFunction(RepKind kind, int order, std::vector<RepEntry> entries)
      : kind_(kind), order_(order), entries_(std::move(entries)) {
    for (const auto& e : entries_) total_mass_ = checked_add(total_mass_, e.count);
  }

  RepKind kind() const noexcept { return kind_; }
  /// Number of convolved operands: 2 for A∘B and A∗B, k for k-fold sums.
  int order() const noexcept { return order_; }
  std::span<const RepEntry> entries() const noexcept { return entries_; }
  std::size_t support_size() const noexcept { return entries_.size(); }
  Wide total_mass() const noexcept { return total_mass_; }
  bool empty() const noexcept { return entries_.empty(); }

  std::uint64_t operator()(std::int64_t x) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), x,
                               [](const RepEntry& e, std::int64_t v) { return e.value < v; });
    return (it != entries_.end() && it->value == x) ? it->count : 0;
  }

  std::uint64_t max_count() const {
    std::uint64_t m = 0;
    for (const auto& e : entries_) m = std::max(m, e.count);
    return m;
  }

  std::vector<std::int64_t> support() const {
    std::vector<std::int64_t> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.value);
    return out;
  }

  friend bool operator==(const RepFunction& a, const RepFunction& b) {
    return a.kind_ == b.kind_ && a.order_ == b.order_ && a.entries_ == b.entries_;
  }

 private:
  RepKind kind_ = RepKind::difference;
  int order_ = 2;
  std::vector<RepEntry> entries_;
  Wide total_mass_ = 0;
};

namespace detail {

// Merges two key-sorted tables, adding counts on equal keys.
inline std::vector<RepEntry> merge_tables(const std::vector<RepEntry>& x,
                                          const std::vector<RepEntry>& y) {
  std::vector<RepEntry> out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].value < y[j].value) {
      out.push_back(x[i++]);
    } else if (y[j].value < x[i].value) {
      out.push_back(y[j++]);
    } else {
      out.push_back({x[i].value, checked_add_u64(x[i].count, y[j].count)});
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), x.begin() + static_cast<std::ptrdiff_t>(i), x.end());
  out.insert(out.end(), y.begin() + static_cast<std::ptrdiff_t>(j), y.end());
  return out;
}

// Table shifted by `shift`; stays sorted.
inline std::vector<RepEntry> shifted(std::span<const RepEntry> table, std::int64_t shift) {
  std::vector<RepEntry> out(table.begin(), table.end());
  for (auto& e : out) e.value += shift;
  return out;
}

// Σ_{s ∈ shifts} table(· - s), as a balanced merge tree of sorted runs.
inline std::vector<RepEntry> merge_runs(std::span<const RepEntry> table,
                                        std::span<const std::int64_t> shifts) {
  if (shifts.size() == 1) return shifted(table, shifts.front());
  const auto mid = shifts.size() / 2;
  return merge_tables(merge_runs(table, shifts.first(mid)),
                      merge_runs(table, shifts.subspan(mid)));
}

// Same sum via a flat histogram over [lo, lo + span).
inline std::vector<RepEntry> dense_runs(std::span<const RepEntry> table,
                                        std::span<const std::int64_t> shifts, std::int64_t lo,
                                        std::uint64_t span) {
  std::vector<std::uint64_t> hist(span, 0);
  for (auto s : shifts) {
    for (const auto& e : table) {
      auto& slot = hist[static_cast<std::size_t>(e.value + s - lo)];
      slot = checked_add_u64(slot, e.count);
    }
  }
  std::vector<RepEntry> out;
  for (std::uint64_t i = 0; i < span; ++i) {
    if (hist[i] != 0) out.push_back({lo + static_cast<std::int64_t>(i), hist[i]});
  }
  return out;
}

// Σ_{s ∈ shifts} table(· - s); shifts ascending or descending.
inline std::vector<RepEntry> convolve_shifts(std::span<const RepEntry> table,
                                             std::span<const std::int64_t> shifts,
                                             const Budget& budget, const char* what) {
  require_budget(static_cast<Wide>(table.size()) * shifts.size(), budget.pairs, what);
  if (table.empty() || shifts.empty()) return {};
  const auto [smin, smax] = std::minmax_element(shifts.begin(), shifts.end());
  const std::int64_t lo = table.front().value + *smin;
  const std::int64_t hi = table.back().value + *smax;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  // The dense pass also scans the span once, so skip it when mostly empty.
  const auto work = static_cast<std::uint64_t>(table.size() * shifts.size());
  if (span <= budget.dense_span && span <= 4 * work + 4096) {
    return dense_runs(table, shifts, lo, span);
  }
  return merge_runs(table, shifts);
}

inline std::vector<RepEntry> indicator_table(const OrderedIntSet& a) {
  std::vector<RepEntry> t;
  t.reserve(a.size());
  for (auto v : a) t.push_back({v, 1});
  return t;
}

}  // namespace detail

/// A∘B keyed by a - b: counts(x) = #{(a, b) : a - b = x}.
inline RepFunction difference_rep(const OrderedIntSet& a, const OrderedIntSet& b,
                                  const Budget& budget = {}) {
  std::vector<std::int64_t> shifts;
  shifts.reserve(b.size());
  for (auto it = b.elements().rbegin(); it != b.elements().rend(); ++it) shifts.push_back(-*it);
  auto table = detail::indicator_table(a);
  return {RepKind::difference, 2, detail::convolve_shifts(table, shifts, budget, "difference_rep")};
}

/// A∗B: counts(x) = #{(a, b) : a + b = x}.
inline RepFunction sum_rep(const OrderedIntSet& a, const OrderedIntSet& b,
                           const Budget& budget = {}) {
  std::vector<std::int64_t> shifts(b.begin(), b.end());
  auto table = detail::indicator_table(a);
  return {RepKind::sum, 2, detail::convolve_shifts(table, shifts, budget, "sum_rep")};
}

/// k-fold A∗⋯∗A for k in {2, 3, 4}, built by convolving the accumulated
/// table with A once per extra operand.
inline RepFunction iterated_sum_rep(const OrderedIntSet& a, int k, const Budget& budget = {}) {
  if (k < 2 || k > 4) {
    throw Error(Errc::degenerate_input, "iterated_sum_rep supports k in {2,3,4}");
  }
  std::vector<std::int64_t> shifts(a.begin(), a.end());
  auto table = detail::indicator_table(a);
  for (int j = 2; j <= k; ++j) {
    table = detail::convolve_shifts(table, shifts, budget, "iterated_sum_rep");
  }
  return {k == 2 ? RepKind::sum : RepKind::iterated_sum, k, std::move(table)};
}

/// Σ_x counts(x)^k, exact.
inline Wide energy_exact(const RepFunction& rep, unsigned k) {
  Wide total = 0;
  for (const auto& e : rep.entries()) total = checked_add(total, checked_pow(e.count, k));
  return total;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Σ_x counts(x)^k for real k >= 1 (compensated double precision).
inline double energy(const RepFunction& rep, double k) {
  if (!(k >= 1.0)) throw Error(Errc::degenerate_input, "energy exponent must be >= 1");
  CompensatedSum sum;
  for (const auto& e : rep.entries()) sum.add(std::pow(static_cast<double>(e.count), k));
  return sum.value();
}

/// T_k(A) = Σ_x (A∗⋯∗A)(x)², k-fold.
inline Wide t_energy(const OrderedIntSet& a, int k, const Budget& budget = {}) {
  return energy_exact(iterated_sum_rep(a, k, budget), 2);
}

/// E_k(A, B) = Σ_x (A∘B)(x)^k, exact for integer k.
inline Wide cross_energy(const OrderedIntSet& a, const OrderedIntSet& b, unsigned k,
                         const Budget& budget = {}) {
  return energy_exact(difference_rep(a, b, budget), k);
}

inline double cross_energy_fractional(const OrderedIntSet& a, const OrderedIntSet& b, double k,
                                      const Budget& budget = {}) {
  return energy(difference_rep(a, b, budget), k);
}

/// Σ_x f(x)·g(x)^p over the common support of two reps.
inline Wide weighted_join(const RepFunction& f, unsigned f_power, const RepFunction& g) {
  Wide total = 0;
  auto fe = f.entries();
  auto ge = g.entries();
  std::size_t i = 0, j = 0;
  while (i < fe.size() && j < ge.size()) {
    if (fe[i].value < ge[j].value) {
      ++i;
    } else if (ge[j].value < fe[i].value) {
      ++j;
    } else {
      total = checked_add(total, checked_mul(checked_pow(fe[i].count, f_power), ge[j].count));
      ++i;
      ++j;
    }
  }
  return total;
}

/// E_3(A, A, S) = Σ_x (A∘A)(x)² (S∘S)(x).
inline Wide triple_energy_weighted(const RepFunction& a_diff, const OrderedIntSet& s,
                                   const Budget& budget = {}) {
  return weighted_join(a_diff, 2, difference_rep(s, s, budget));
}

inline Wide triple_energy_weighted(const OrderedIntSet& a, const OrderedIntSet& s,
                                   const Budget& budget = {}) {
  return triple_energy_weighted(difference_rep(a, a, budget), s, budget);
}

/// Direct count of (a1, b1, ..., ak, bk) with a1 - b1 = ... = ak - bk.
inline Wide brute_force_energy(const OrderedIntSet& a, const OrderedIntSet& b, int k,
                               const Budget& budget = {}) {
  if (k < 1) throw Error(Errc::degenerate_input, "brute_force_energy needs k >= 1");
  const Wide pairs = static_cast<Wide>(a.size()) * b.size();
  Wide tuples = 1;
  for (int i = 0; i < k; ++i) tuples = checked_mul(tuples, pairs);
  require_budget(tuples, budget.pairs, "brute_force_energy");
  Wide count = 0;
  std::function<void(int, std::int64_t)> extend = [&](int depth, std::int64_t diff) {
    if (depth == k) {
      count += 1;
      return;
    }
    for (auto x : a) {
      for (auto y : b) {
        if (depth == 0 || x - y == diff) extend(depth + 1, x - y);
      }
    }
  };
  extend(0, 0);
  return count;
}

/// Direct count of 2k-tuples of A with a1 + ... + ak = a'1 + ... + a'k.
inline Wide brute_force_t(const OrderedIntSet& a, int k, const Budget& budget = {}) {
  if (k < 1) throw Error(Errc::degenerate_input, "brute_force_t needs k >= 1");
  require_budget(checked_pow(a.size(), static_cast<unsigned>(2 * k)), budget.pairs,
                 "brute_force_t");
  const auto n = a.size();
  const auto width = static_cast<std::size_t>(2 * k);
  std::vector<std::size_t> idx(width, 0);
  Wide count = 0;
  while (true) {
    std::int64_t balance = 0;
    for (std::size_t i = 0; i < width; ++i) {
      balance += (i < static_cast<std::size_t>(k) ? 1 : -1) * a[idx[i]];
    }
    if (balance == 0) count += 1;
    std::size_t pos = 0;
    while (pos < width && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == width) break;
  }
  return count;
}

/// Energies of one set, computed through the convolution path.
struct EnergyProfile {
  Wide e2 = 0;
  Wide e3 = 0;
  Wide t2 = 0;
  std::optional<Wide> t4;  // absent when over budget or above the size cap
  std::map<double, double> e_fractional;
  std::size_t difference_support = 0;
};

inline constexpr double kEightThirds = 8.0 / 3.0;

inline EnergyProfile energy_profile(const OrderedIntSet& a, const Budget& budget = {},
                                    std::size_t t4_max_n = 128,
                                    const std::vector<double>& fractional = {kEightThirds}) {
  EnergyProfile p;
  const auto diff = difference_rep(a, a, budget);
  p.e2 = energy_exact(diff, 2);
  p.e3 = energy_exact(diff, 3);
  p.t2 = t_energy(a, 2, budget);
  p.difference_support = diff.support_size();
  if (a.size() <= t4_max_n) {
    try {
      p.t4 = t_energy(a, 4, budget);
    } catch (const Error& e) {
      if (e.code() != Errc::budget_exceeded) throw;
    }
  }
  for (double k : fractional) p.e_fractional[k] = energy(diff, k);
  return p;
}

}  // namespace convexlab
