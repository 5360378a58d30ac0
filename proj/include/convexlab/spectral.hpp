#pragma once

/// Popularity sets, dyadic band decomposition of a representation
/// function, operator matrices T^g_{A,B}, and their principal eigenvalue.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "convexlab/energy.hpp"
#include "convexlab/error.hpp"
#include "convexlab/ordered_set.hpp"
#include "convexlab/wide_int.hpp"

namespace convexlab {

enum class SliceMode { threshold, dyadic_band };

constexpr std::string_view to_string(SliceMode m) {
  return m == SliceMode::threshold ? "threshold" : "dyadic-band";
}

constexpr std::string_view to_string(RepKind k) {
  switch (k) {
    case RepKind::difference: return "difference";
    case RepKind::sum: return "sum";
    case RepKind::iterated_sum: return "iterated-sum";
  }
  return "unknown";
}

/// S_τ = {x : counts(x) >= τ}, or a band {x : Δ <= counts(x) < 2Δ}.
struct PopularitySlice {
  SliceMode mode = SliceMode::threshold;
  std::uint64_t level = 1;  // τ or Δ
  std::vector<std::int64_t> support;
  Wide mass = 0;  // Σ counts² over the support
  RepKind source_kind = RepKind::difference;

  bool empty() const noexcept { return support.empty(); }
  std::size_t size() const noexcept { return support.size(); }

  /// The support as a set; throws on an empty slice.
  OrderedIntSet as_set() const {
    if (support.empty()) throw Error(Errc::empty_range, "popularity slice is empty");
    return from_sorted_unique(support);
  }
};

inline PopularitySlice popularity_set(const RepFunction& rep, std::uint64_t tau) {
  if (tau < 1) throw Error(Errc::degenerate_input, "popularity threshold must be >= 1");
  PopularitySlice s{SliceMode::threshold, tau, {}, 0, rep.kind()};
  for (const auto& e : rep.entries()) {
    if (e.count >= tau) {
      s.support.push_back(e.value);
      s.mass = checked_add(s.mass, static_cast<Wide>(e.count) * e.count);
    }
  }
  return s;
}

/// floor(log2 c) for c >= 1.
inline int dyadic_index(std::uint64_t count) { return std::bit_width(count) - 1; }

/// Nonempty bands [2^t, 2^{t+1}) ordered by t. They partition the support.
inline std::vector<PopularitySlice> dyadic_slices(const RepFunction& rep) {
  std::vector<PopularitySlice> bands;
  if (rep.empty()) return bands;
  const int top = dyadic_index(rep.max_count());
  std::vector<PopularitySlice> all(static_cast<std::size_t>(top + 1));
  for (int t = 0; t <= top; ++t) {
    all[static_cast<std::size_t>(t)] = {SliceMode::dyadic_band, std::uint64_t{1} << t, {}, 0,
                                        rep.kind()};
  }
  for (const auto& e : rep.entries()) {
    auto& band = all[static_cast<std::size_t>(dyadic_index(e.count))];
    band.support.push_back(e.value);
    band.mass = checked_add(band.mass, static_cast<Wide>(e.count) * e.count);
  }
  for (auto& b : all) {
    if (!b.empty()) bands.push_back(std::move(b));
  }
  return bands;
}

/// ⌈log2(max count)⌉ + 1, the band count used by the pigeonhole bound.
inline int pigeonhole_band_bound(const RepFunction& rep) {
  const auto m = rep.max_count();
  if (m <= 1) return 1;
  return std::bit_width(m - 1) + 1;
}

/// The heaviest band whose Δ lies in [lower, upper]. Among B such bands
/// with total mass M the result has mass >= M / B.
inline PopularitySlice heaviest_slice(const RepFunction& rep, double lower, double upper) {
  if (!(lower <= upper)) throw Error(Errc::empty_range, "lower bound exceeds upper bound");
  std::optional<PopularitySlice> best;
  for (auto& band : dyadic_slices(rep)) {
    const auto delta = static_cast<double>(band.level);
    if (delta < lower || delta > upper) continue;
    if (!best || band.mass > best->mass) best = std::move(band);
  }
  if (!best) {
    throw Error(Errc::empty_range, "no dyadic band has Δ in [" + std::to_string(lower) + ", " +
                                       std::to_string(upper) + "]");
  }
  return std::move(*best);
}

enum class OperatorMode { difference, sum };

/// Dense |A| x |B| matrix with entry (i, j) = g(a_i - b_j) or g(a_i + b_j).
struct OperatorMatrix {
  std::vector<std::int64_t> row_elements;
  std::vector<std::int64_t> col_elements;
  OperatorMode mode = OperatorMode::difference;
  std::vector<double> data;  // row-major

  std::size_t rows() const noexcept { return row_elements.size(); }
  std::size_t cols() const noexcept { return col_elements.size(); }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

  bool is_symmetric() const {
    if (rows() != cols()) return false;
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  /// 1ᵀ M 1.
  double total() const {
    CompensatedSum s;
    for (double v : data) s.add(v);
    return s.value();
  }
};

inline OperatorMatrix operator_matrix(const OrderedIntSet& a, const OrderedIntSet& b,
                                      const std::function<double(std::int64_t)>& weight,
                                      OperatorMode mode, const Budget& budget = {}) {
  require_budget(static_cast<Wide>(a.size()) * b.size(), budget.matrix, "operator_matrix");
  OperatorMatrix m{{a.begin(), a.end()}, {b.begin(), b.end()}, mode, {}};
  m.data.reserve(a.size() * b.size());
  for (auto x : a)
    for (auto y : b) m.data.push_back(weight(mode == OperatorMode::difference ? x - y : x + y));
  return m;
}

/// T^g_{A,B} with g a representation function (absent keys read as 0).
inline OperatorMatrix operator_matrix(const OrderedIntSet& a, const OrderedIntSet& b,
                                      const RepFunction& g, OperatorMode mode,
                                      const Budget& budget = {}) {
  return operator_matrix(
      a, b, [&g](std::int64_t x) { return static_cast<double>(g(x)); }, mode, budget);
}

/// T^g_{A,B} with g the indicator function of a set.
inline OperatorMatrix operator_matrix(const OrderedIntSet& a, const OrderedIntSet& b,
                                      const OrderedIntSet& g_support, OperatorMode mode,
                                      const Budget& budget = {}) {
  return operator_matrix(
      a, b, [&g_support](std::int64_t x) { return g_support.contains(x) ? 1.0 : 0.0; }, mode,
      budget);
}

struct EigenOptions {
  double tol = 1e-10;
  int max_iter = 10'000;
};

namespace detail {

inline void multiply(const OperatorMatrix& m, std::span<const double> x, std::span<double> y) {
  const auto c = m.cols();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.data.data() + i * c;
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

inline void multiply_transposed(const OperatorMatrix& m, std::span<const double> x,
                                std::span<double> y) {
  std::fill(y.begin(), y.end(), 0.0);
  const auto c = m.cols();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.data.data() + i * c;
    for (std::size_t j = 0; j < c; ++j) y[j] += row[j] * x[i];
  }
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace detail

/// Dominant eigenvalue by power iteration from the all-ones vector.
/// Symmetric input iterates M itself and returns the converged Rayleigh
/// quotient; any other input iterates MᵀM and returns the square root of
/// its dominant eigenvalue (the top singular value of M).
inline double principal_eigenvalue(const OperatorMatrix& m, const EigenOptions& opt = {}) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const bool symmetric = m.is_symmetric();
  const std::size_t dim = m.cols();
  std::vector<double> x(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  std::vector<double> y(dim), tmp(m.rows());

  auto apply = [&](std::span<const double> in, std::span<double> out) {
    if (symmetric) {
      detail::multiply(m, in, out);
    } else {
      detail::multiply(m, in, tmp);
      detail::multiply_transposed(m, tmp, out);
    }
  };

  double previous = 0.0;
  double gap = 0.0;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    apply(x, y);
    const double rayleigh = detail::dot(x, y);
    const double norm = std::sqrt(detail::dot(y, y));
    if (norm == 0.0) return 0.0;
    gap = iter == 1 ? INFINITY : std::fabs(rayleigh - previous) / std::max(std::fabs(rayleigh), 1e-300);
    if (gap < opt.tol) return symmetric ? rayleigh : std::sqrt(rayleigh);
    previous = rayleigh;
    for (std::size_t i = 0; i < dim; ++i) x[i] = y[i] / norm;
  }
  throw NonConvergenceError(symmetric ? previous : std::sqrt(previous), gap, opt.max_iter);
}

inline constexpr double kDecayExponent = 3.0 / 8.0;

/// Counts sorted descending (the s_j ordering) and
/// sup_j counts[j] * j^exponent / n, j counted from 1.
struct DecayProfile {
  std::vector<std::uint64_t> sorted_counts;
  double exponent = kDecayExponent;
  double sup_constant = 0.0;
  std::size_t argmax_j = 1;
};

inline DecayProfile decay_profile(const RepFunction& rep, std::size_t n,
                                  double exponent = kDecayExponent) {
  if (n == 0) throw Error(Errc::degenerate_input, "decay_profile needs |A| >= 1");
  DecayProfile d;
  d.exponent = exponent;
  d.sorted_counts.reserve(rep.support_size());
  for (const auto& e : rep.entries()) d.sorted_counts.push_back(e.count);
  std::sort(d.sorted_counts.begin(), d.sorted_counts.end(), std::greater<>());
  for (std::size_t j = 1; j <= d.sorted_counts.size(); ++j) {
    const double value = static_cast<double>(d.sorted_counts[j - 1]) *
                         std::pow(static_cast<double>(j), exponent) / static_cast<double>(n);
    if (value > d.sup_constant) {
      d.sup_constant = value;
      d.argmax_j = j;
    }
  }
  return d;
}

}  // namespace convexlab
