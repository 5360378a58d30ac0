#pragma once

/// The inequality catalog.
///
/// Every statement is evaluated on one set and reported as a CheckResult.
/// Exact-layer statements hold with constant 1 and are asserted; a failure
/// there means an arithmetic bug. Asymptotic-layer statements carry an
/// unknown constant, so only the ratio lhs/rhs is recorded and trends are
/// judged across a family by ExponentFit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convexlab/energy.hpp"
#include "convexlab/error.hpp"
#include "convexlab/generators.hpp"
#include "convexlab/ordered_set.hpp"
#include "convexlab/spectral.hpp"
#include "convexlab/wide_int.hpp"

namespace convexlab {

enum class Layer { exact, asymptotic };
enum class Bound { upper, lower, equality };
enum class Status { evaluated, skipped, not_applicable };

constexpr std::string_view to_string(Layer l) { return l == Layer::exact ? "exact" : "asymptotic"; }
constexpr std::string_view to_string(Bound b) {
  switch (b) {
    case Bound::upper: return "upper";
    case Bound::lower: return "lower";
    case Bound::equality: return "equality";
  }
  return "upper";
}
constexpr std::string_view to_string(Status s) {
  switch (s) {
    case Status::evaluated: return "evaluated";
    case Status::skipped: return "skipped";
    case Status::not_applicable: return "not-applicable";
  }
  return "evaluated";
}

struct CheckResult {
  std::string check_id;
  std::string set_id;
  Layer layer = Layer::exact;
  Bound bound = Bound::upper;
  Status status = Status::evaluated;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  // Exact layer only: decimal renderings of the wide-integer operands.
  std::string lhs_exact;
  std::string rhs_exact;
  bool pass = true;
  bool tightest = false;
  std::map<std::string, double> params;
  std::string note;

  bool failed() const noexcept { return status == Status::evaluated && !pass; }
};

struct VerifyOptions {
  Budget budget;
  std::size_t t4_max_n = 128;
  EigenOptions eigen;
  double eigen_slack = 1e-9;
  double decay_exponent = kDecayExponent;
};

/// Everything the checks read about one set. Energies are recomputed by
/// the checks from `diff`, while `t2` and `t4` come from the independent
/// iterated-sum path, so corrupting `diff` is observable.
struct SetAnalysis {
  std::string set_id;
  OrderedIntSet set = make_set({0});
  DerivativeSignature signature;
  RepFunction diff;
  RepFunction sum;
  Wide t2 = 0;
  std::optional<Wide> t4;
  std::string t4_note;
};

inline SetAnalysis analyze(const OrderedIntSet& a, std::string set_id,
                           const VerifyOptions& opt = {}) {
  SetAnalysis s;
  s.set_id = std::move(set_id);
  s.set = a;
  s.signature = available_signature(a, 4);
  s.diff = difference_rep(a, a, opt.budget);
  s.sum = sum_rep(a, a, opt.budget);
  s.t2 = t_energy(a, 2, opt.budget);
  if (a.size() > opt.t4_max_n) {
    s.t4_note = "T_4 capped at n <= " + std::to_string(opt.t4_max_n);
  } else {
    try {
      s.t4 = t_energy(a, 4, opt.budget);
    } catch (const Error& e) {
      if (e.code() != Errc::budget_exceeded) throw;
      s.t4_note = e.what();
    }
  }
  return s;
}

/// τ = 1, 2, 4, ... up to the largest count of `rep`.
inline std::vector<std::uint64_t> dyadic_levels(const RepFunction& rep) {
  std::vector<std::uint64_t> out;
  const auto top = rep.max_count();
  for (std::uint64_t t = 1; t <= top && t != 0; t <<= 1) out.push_back(t);
  return out;
}

namespace detail {

inline CheckResult make_result(const SetAnalysis& s, std::string id, Layer layer, Bound bound) {
  CheckResult r;
  r.check_id = std::move(id);
  r.set_id = s.set_id;
  r.layer = layer;
  r.bound = bound;
  return r;
}

inline double safe_ratio(double lhs, double rhs) {
  if (rhs == 0.0) return lhs == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

inline CheckResult exact_le(CheckResult r, Wide lhs, Wide rhs) {
  r.lhs = to_double(lhs);
  r.rhs = to_double(rhs);
  r.lhs_exact = to_string(lhs);
  r.rhs_exact = to_string(rhs);
  r.ratio = safe_ratio(r.lhs, r.rhs);
  r.pass = r.bound == Bound::equality ? lhs == rhs : lhs <= rhs;
  return r;
}

inline CheckResult skipped(CheckResult r, std::string why) {
  r.status = Status::skipped;
  r.note = std::move(why);
  return r;
}

inline CheckResult not_applicable(CheckResult r, std::string why) {
  r.status = Status::not_applicable;
  r.note = std::move(why);
  return r;
}

inline CheckResult ratio_record(CheckResult r, double lhs, double rhs) {
  r.layer = Layer::asymptotic;
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = safe_ratio(lhs, rhs);
  r.pass = true;
  return r;
}

// Runs `body`; budget errors turn into a skip marker.
template <typename Body>
CheckResult guarded(CheckResult base, Body&& body) {
  try {
    return body(base);
  } catch (const Error& e) {
    if (e.code() != Errc::budget_exceeded && e.code() != Errc::non_convergence) throw;
    return skipped(std::move(base), e.what());
  }
}

}  // namespace detail

/// Exact identities and inequalities that hold with constant 1:
/// E = T_2, Σ A∘A = n², τ^k|S_τ| <= E_k (k = 2, 3), τ⁴ E(S_τ) <= T_4,
/// E(A,S_τ)² <= E(A) E(S_τ), and μ₁(T^{A∘A}_{A,A}) >= E/n.
inline std::vector<CheckResult> check_exact(const SetAnalysis& s, const VerifyOptions& opt = {}) {
  using detail::exact_le;
  using detail::make_result;
  std::vector<CheckResult> out;
  const auto& a = s.set;
  const Wide n = a.size();
  const Wide e2 = energy_exact(s.diff, 2);
  const Wide e3 = energy_exact(s.diff, 3);

  out.push_back(exact_le(make_result(s, "energy-equals-t2", Layer::exact, Bound::equality), e2,
                         s.t2));
  out.push_back(exact_le(make_result(s, "mass-conservation", Layer::exact, Bound::equality),
                         s.diff.total_mass(), n * n));

  for (auto tau : dyadic_levels(s.diff)) {
    const auto slice = popularity_set(s.diff, tau);
    const Wide size = slice.size();
    const Wide t = tau;
    auto tag = [tau](CheckResult r) {
      r.params["tau"] = static_cast<double>(tau);
      return r;
    };
    out.push_back(exact_le(tag(make_result(s, "popularity-second-moment", Layer::exact,
                                           Bound::upper)),
                           checked_mul(t * t, size), e2));
    out.push_back(exact_le(tag(make_result(s, "popularity-third-moment", Layer::exact,
                                           Bound::upper)),
                           checked_mul(checked_pow(t, 3), size), e3));

    if (slice.empty()) continue;
    const auto support = slice.as_set();
    std::optional<Wide> popular_energy;
    std::string popular_note;
    try {
      popular_energy = cross_energy(support, support, 2, opt.budget);
    } catch (const Error& e) {
      if (e.code() != Errc::budget_exceeded) throw;
      popular_note = e.what();
    }

    auto t4_check = tag(make_result(s, "popular-energy-vs-t4", Layer::exact, Bound::upper));
    if (!s.t4) {
      out.push_back(detail::skipped(std::move(t4_check), s.t4_note));
    } else if (!popular_energy) {
      out.push_back(detail::skipped(std::move(t4_check), popular_note));
    } else {
      out.push_back(exact_le(std::move(t4_check), checked_mul(checked_pow(t, 4), *popular_energy),
                             *s.t4));
    }

    auto cs = tag(make_result(s, "cauchy-schwarz", Layer::exact, Bound::upper));
    if (!popular_energy) {
      out.push_back(detail::skipped(std::move(cs), popular_note));
    } else {
      out.push_back(detail::guarded(std::move(cs), [&](CheckResult r) {
        const Wide cross = cross_energy(a, support, 2, opt.budget);
        return exact_le(std::move(r), checked_mul(cross, cross), checked_mul(e2, *popular_energy));
      }));
    }
  }

  out.push_back(detail::guarded(
      make_result(s, "rayleigh-lower-bound", Layer::exact, Bound::upper), [&](CheckResult r) {
        const auto m = operator_matrix(a, a, s.diff, OperatorMode::difference, opt.budget);
        const double mu = principal_eigenvalue(m, opt.eigen);
        r.lhs = to_double(e2) / static_cast<double>(a.size());
        r.rhs = mu;
        r.ratio = detail::safe_ratio(r.lhs, r.rhs);
        r.lhs_exact = to_string(e2) + "/" + std::to_string(a.size());
        r.pass = r.lhs * (1.0 - opt.eigen_slack) <= r.rhs;
        r.params["slack"] = opt.eigen_slack;
        return r;
      }));
  return out;
}

inline std::vector<CheckResult> check_exact(const OrderedIntSet& a, const VerifyOptions& opt = {},
                                            std::string set_id = "set") {
  return check_exact(analyze(a, std::move(set_id), opt), opt);
}

namespace detail {

struct Hypothesis {
  std::string_view label;
  int min_n;
  std::function<bool(const SetAnalysis&)> holds;
};

inline Hypothesis convex_hyp() {
  return {"d2>0", 3, [](const SetAnalysis& s) { return s.signature.is_convex(); }};
}
inline Hypothesis third_nonpositive_hyp() {
  return {"d2>0,d3<=0", 4, [](const SetAnalysis& s) {
            return s.signature.is_convex() && s.signature.level_is(3, Sign::non_positive);
          }};
}
inline Hypothesis target_hyp() {
  return {"d2>0,d3<0", 4, [](const SetAnalysis& s) { return s.signature.in_target_class(); }};
}
inline Hypothesis fourth_hyp() {
  return {"d2>0,d3<0,d4<=0", 5, [](const SetAnalysis& s) {
            return s.signature.in_target_class() && s.signature.level_is(4, Sign::non_positive);
          }};
}
inline Hypothesis distinct_second_hyp() {
  return {"d2>0,distinct-d2", 3, [](const SetAnalysis& s) {
            return s.signature.is_convex() && second_differences_distinct(s.set);
          }};
}

// Returns a not-applicable record when the hypothesis fails.
inline std::optional<CheckResult> gate(const SetAnalysis& s, const CheckResult& base,
                                       const Hypothesis& h) {
  if (static_cast<int>(s.set.size()) < h.min_n || !h.holds(s)) {
    return not_applicable(base, "hypothesis " + std::string(h.label) + " not met");
  }
  return std::nullopt;
}

}  // namespace detail

/// Ratio records for the asymptotic statements, each gated on its own
/// derivative-sign hypothesis. τ-scanned statements keep the worst τ.
inline std::vector<CheckResult> check_asymptotic(const SetAnalysis& s,
                                                 const VerifyOptions& opt = {}) {
  using detail::make_result;
  using detail::ratio_record;
  std::vector<CheckResult> out;
  const auto& a = s.set;
  const double n = static_cast<double>(a.size());
  const double e2 = to_double(energy_exact(s.diff, 2));
  const double sumset_size = static_cast<double>(s.sum.support_size());

  auto emit = [&](CheckResult base, const detail::Hypothesis& h, auto&& body) {
    base.layer = Layer::asymptotic;
    if (auto na = detail::gate(s, base, h)) {
      out.push_back(std::move(*na));
      return;
    }
    out.push_back(detail::guarded(std::move(base), body));
  };

  auto power_lower = [&](std::string id, double exponent, const detail::Hypothesis& h) {
    emit(make_result(s, std::move(id), Layer::asymptotic, Bound::lower), h, [&](CheckResult r) {
      r.params["exponent"] = exponent;
      return ratio_record(std::move(r), sumset_size, std::pow(n, exponent));
    });
  };
  auto energy_upper = [&](std::string id, double exponent, const detail::Hypothesis& h) {
    emit(make_result(s, std::move(id), Layer::asymptotic, Bound::upper), h, [&](CheckResult r) {
      r.params["exponent"] = exponent;
      return ratio_record(std::move(r), e2, std::pow(n, exponent));
    });
  };

  power_lower("sumset-3-2", 1.5, detail::convex_hyp());
  power_lower("sumset-8-5", 8.0 / 5.0, detail::third_nonpositive_hyp());
  power_lower("sumset-5-3", 5.0 / 3.0, detail::fourth_hyp());
  power_lower("sumset-221-137", 221.0 / 137.0, detail::target_hyp());
  energy_upper("energy-12-5", 12.0 / 5.0, detail::third_nonpositive_hyp());
  energy_upper("energy-328-137", 328.0 / 137.0, detail::target_hyp());

  emit(make_result(s, "energy-5-2", Layer::asymptotic, Bound::upper), detail::convex_hyp(),
       [&](CheckResult r) { return ratio_record(std::move(r), e2, n * std::pow(n, 1.5)); });

  // E(A, S_τ) against |A||S_τ|^{3/2} and the τ^{-2}|A|²E^{7/8} bound.
  struct PopularCross {
    std::uint64_t tau;
    double size;
    double cross;
  };
  std::vector<PopularCross> popular;
  std::string popular_note;
  for (auto tau : dyadic_levels(s.diff)) {
    const auto slice = popularity_set(s.diff, tau);
    if (slice.empty()) continue;
    try {
      popular.push_back({tau, static_cast<double>(slice.size()),
                         to_double(cross_energy(a, slice.as_set(), 2, opt.budget))});
    } catch (const Error& e) {
      if (e.code() != Errc::budget_exceeded) throw;
      popular_note = e.what();
    }
  }
  auto worst_over_tau = [&](std::string id, const detail::Hypothesis& h, auto&& rhs_of) {
    emit(make_result(s, std::move(id), Layer::asymptotic, Bound::upper), h, [&](CheckResult r) {
      if (popular.empty()) {
        return detail::skipped(std::move(r), popular_note.empty() ? "no popular slice"
                                                                  : popular_note);
      }
      std::optional<CheckResult> worst;
      for (const auto& p : popular) {
        auto rec = ratio_record(r, p.cross, rhs_of(p));
        rec.params["tau"] = static_cast<double>(p.tau);
        rec.params["slice_size"] = p.size;
        if (!worst || rec.ratio > worst->ratio) worst = std::move(rec);
      }
      if (!popular_note.empty()) worst->note = "some τ skipped: " + popular_note;
      return std::move(*worst);
    });
  };
  worst_over_tau("popular-cross-3-2", detail::convex_hyp(),
                 [&](const PopularCross& p) { return n * std::pow(p.size, 1.5); });
  worst_over_tau("popular-cross-energy", detail::target_hyp(), [&](const PopularCross& p) {
    const double t = static_cast<double>(p.tau);
    return n * n * std::pow(e2, 7.0 / 8.0) / (t * t);
  });

  emit(make_result(s, "t4-distinct-second", Layer::asymptotic, Bound::upper),
       detail::distinct_second_hyp(), [&](CheckResult r) {
         if (!s.t4) return detail::skipped(std::move(r), s.t4_note);
         const double t2 = to_double(s.t2);
         const double rhs = n * n * n * t2 + n * n * n * n * std::pow(t2, 0.75);
         return ratio_record(std::move(r), to_double(*s.t4), rhs);
       });

  auto decay = [&](std::string id, const RepFunction& rep) {
    emit(make_result(s, std::move(id), Layer::asymptotic, Bound::upper),
         detail::third_nonpositive_hyp(), [&](CheckResult r) {
           const auto d = decay_profile(rep, a.size(), opt.decay_exponent);
           r.params["j"] = static_cast<double>(d.argmax_j);
           r.params["exponent"] = d.exponent;
           const double lhs = static_cast<double>(d.sorted_counts[d.argmax_j - 1]) *
                              std::pow(static_cast<double>(d.argmax_j), d.exponent);
           return ratio_record(std::move(r), lhs, n);
         });
  };
  decay("decay-difference", s.diff);
  decay("decay-sum", s.sum);
  return out;
}

inline std::vector<CheckResult> check_asymptotic(const OrderedIntSet& a,
                                                 const VerifyOptions& opt = {},
                                                 std::string set_id = "set") {
  return check_asymptotic(analyze(a, std::move(set_id), opt), opt);
}

/// Final inequalities of the spectral argument, one record per in-range
/// (τ, Δ); the record with the smallest right-hand side is flagged.
///   sumset-triple:  |A|^10/|A+A|² vs E_3(A)·E_3(A,A,S_1)
///   energy-bands:   E⁶/|A|⁶ vs E_3 Δ³ τ² E(A,S_Δ)^{1/2} E(A,S_τ)^{1/2}, S_Δ from A∘A
///   sumset-bands:   |A|^10/|A+A|² vs E_3 τ² Δ⁻¹ E(A,S_Δ)^{1/2} E(A,S_τ)^{1/2}, S_Δ from A∗A
inline std::vector<CheckResult> check_spectral_chain(const SetAnalysis& s,
                                                     const VerifyOptions& opt = {}) {
  using detail::make_result;
  using detail::ratio_record;
  std::vector<CheckResult> out;
  const auto& a = s.set;
  const double n = static_cast<double>(a.size());
  const double e2 = to_double(energy_exact(s.diff, 2));
  const double e3 = to_double(energy_exact(s.diff, 3));
  const double sumset_size = static_cast<double>(s.sum.support_size());
  const double sum_lhs = std::pow(n, 10) / (sumset_size * sumset_size);

  auto base = [&](std::string id) {
    return make_result(s, std::move(id), Layer::asymptotic, Bound::upper);
  };
  if (a.size() < 2) {
    for (auto id : {"spectral-sumset-triple", "spectral-energy-bands", "spectral-sumset-bands"}) {
      out.push_back(detail::not_applicable(base(id), "needs |A| >= 2"));
    }
    return out;
  }

  // S_1 is the heaviest A∗A band with Δ >= |A|²/|A+A|.
  {
    auto r = base("spectral-sumset-triple");
    r.layer = Layer::asymptotic;
    try {
      const auto s1 =
          heaviest_slice(s.sum, n * n / sumset_size, static_cast<double>(s.sum.max_count()));
      r.params["delta"] = static_cast<double>(s1.level);
      r.params["slice_size"] = static_cast<double>(s1.size());
      out.push_back(detail::guarded(std::move(r), [&](CheckResult rec) {
        const double weighted = to_double(triple_energy_weighted(s.diff, s1.as_set(), opt.budget));
        auto done = ratio_record(std::move(rec), sum_lhs, e3 * weighted);
        done.tightest = true;
        return done;
      }));
    } catch (const Error& e) {
      if (e.code() != Errc::empty_range) throw;
      out.push_back(detail::not_applicable(std::move(r), e.what()));
    }
  }

  // τ-side factor τ² E(A,S_τ)^{1/2} for every dyadic τ that fits the budget.
  struct TauFactor {
    std::uint64_t tau;
    double value;
  };
  std::vector<TauFactor> tau_factors;
  std::vector<std::uint64_t> skipped_taus;
  for (auto tau : dyadic_levels(s.diff)) {
    const auto slice = popularity_set(s.diff, tau);
    try {
      const double cross = to_double(cross_energy(a, slice.as_set(), 2, opt.budget));
      const double t = static_cast<double>(tau);
      tau_factors.push_back({tau, t * t * std::sqrt(cross)});
    } catch (const Error& e) {
      if (e.code() != Errc::budget_exceeded) throw;
      skipped_taus.push_back(tau);
    }
  }

  auto scan = [&](std::string id, const RepFunction& source, double lower, double upper,
                  double delta_power, double lhs) {
    auto r = base(id);
    r.layer = Layer::asymptotic;
    PopularitySlice band;
    try {
      band = heaviest_slice(source, lower, upper);
    } catch (const Error& e) {
      if (e.code() != Errc::empty_range) throw;
      out.push_back(detail::not_applicable(std::move(r), e.what()));
      return;
    }
    const double delta = static_cast<double>(band.level);
    r.params["delta"] = delta;
    r.params["delta_lower"] = lower;
    r.params["delta_upper"] = upper;
    double band_cross = 0.0;
    try {
      band_cross = to_double(cross_energy(a, band.as_set(), 2, opt.budget));
    } catch (const Error& e) {
      if (e.code() != Errc::budget_exceeded) throw;
      out.push_back(detail::skipped(std::move(r), e.what()));
      return;
    }
    const auto first = out.size();
    std::size_t tightest = first;
    for (const auto& tf : tau_factors) {
      auto rec = r;
      rec.params["tau"] = static_cast<double>(tf.tau);
      const double rhs = e3 * std::pow(delta, delta_power) * tf.value * std::sqrt(band_cross);
      out.push_back(ratio_record(std::move(rec), lhs, rhs));
      if (out.back().rhs < out[tightest].rhs) tightest = out.size() - 1;
    }
    for (auto tau : skipped_taus) {
      auto rec = r;
      rec.params["tau"] = static_cast<double>(tau);
      out.push_back(detail::skipped(std::move(rec), "E(A,S_tau) over pair budget"));
    }
    if (out.size() > first && out[tightest].status == Status::evaluated) {
      out[tightest].tightest = true;
    }
  };

  scan("spectral-energy-bands", s.diff, e2 / (n * n), std::pow(n, 4) / std::pow(e2, 1.5), 3.0,
       std::pow(e2, 6) / std::pow(n, 6));
  scan("spectral-sumset-bands", s.sum, n * n / sumset_size, std::pow(n, 0.4), -1.0, sum_lhs);
  return out;
}

inline std::vector<CheckResult> check_spectral_chain(const OrderedIntSet& a,
                                                     const VerifyOptions& opt = {},
                                                     std::string set_id = "set") {
  return check_spectral_chain(analyze(a, std::move(set_id), opt), opt);
}

struct ExponentFit {
  std::string quantity_id;
  std::vector<std::pair<double, double>> points;  // (n, value)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

/// Least squares of log(value) on log(n).
inline ExponentFit fit_exponent(std::vector<std::pair<double, double>> points,
                                std::string quantity_id = {}) {
  if (points.size() < 3) throw Error(Errc::degenerate_input, "exponent fit needs >= 3 points");
  std::sort(points.begin(), points.end());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].first > 0.0) || !(points[i].second > 0.0)) {
      throw Error(Errc::degenerate_input, "exponent fit needs positive n and values");
    }
    if (i > 0 && points[i].first == points[i - 1].first) {
      throw Error(Errc::degenerate_input, "exponent fit needs distinct n");
    }
  }
  const double m = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  ExponentFit fit;
  fit.quantity_id = std::move(quantity_id);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.points = std::move(points);
  return fit;
}

}  // namespace convexlab
