#pragma once

/// Corpus sweeps: generate every set of a manifest, run the exact,
/// asymptotic and spectral layers on each, and fit growth exponents per
/// family. Output order follows the manifest regardless of how the
/// per-set work was scheduled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "convexlab/energy.hpp"
#include "convexlab/generators.hpp"
#include "convexlab/spectral.hpp"
#include "convexlab/verifier.hpp"

namespace convexlab {

/// Runs body(i) for i in [0, count). The CLI passes a thread pool; the
/// default is a plain loop.
using ParallelFor = std::function<void(std::size_t, const std::function<void(std::size_t)>&)>;

inline void sequential_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

struct SuiteOptions {
  VerifyOptions verify;
  int log_power = 1;  // log^d(n) allowance in the log-adjusted ratio trends
  bool exact = true;
  bool asymptotic = true;
  bool spectral = true;
};

struct SummaryRow {
  std::string family;
  std::string set_id;
  std::size_t n = 0;
  std::string quantity;
  double value = 0.0;
};

/// Per-family spread and trend of one asymptotic ratio.
struct RatioTrend {
  std::string family;
  std::string check_id;
  Bound bound = Bound::upper;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  ExponentFit raw;
  ExponentFit log_adjusted;
};

struct SetReport {
  std::string set_id;
  std::string family;
  std::size_t n = 0;
  std::vector<CheckResult> checks;
  std::vector<SummaryRow> summary;
};

struct SuiteReport {
  std::vector<SetReport> sets;
  std::vector<ExponentFit> fits;
  std::vector<RatioTrend> trends;
  std::optional<CheckResult> first_failure;
  bool aborted = false;

  std::size_t exact_failures() const {
    std::size_t count = 0;
    for (const auto& s : sets)
      for (const auto& c : s.checks) count += c.failed() ? 1 : 0;
    return count;
  }
};

/// Family label used to group sets for fitting.
inline std::string family_key(const GeneratorSpec& spec) {
  std::string key(to_string(spec.family));
  if (spec.family == Family::random_profile) key += "/" + std::string(to_string(spec.params.profile));
  return key;
}

inline std::vector<SummaryRow> summarize(const SetAnalysis& s, const std::string& family,
                                         const std::vector<CheckResult>& checks,
                                         const VerifyOptions& opt) {
  std::vector<SummaryRow> rows;
  const auto n = s.set.size();
  auto add = [&](std::string q, double v) { rows.push_back({family, s.set_id, n, std::move(q), v}); };
  add("sumset", static_cast<double>(s.sum.support_size()));
  add("diffset", static_cast<double>(s.diff.support_size()));
  add("E2", to_double(energy_exact(s.diff, 2)));
  add("E3", to_double(energy_exact(s.diff, 3)));
  add("E8/3", energy(s.diff, kEightThirds));
  add("T2", to_double(s.t2));
  if (s.t4) add("T4", to_double(*s.t4));
  add("decay-difference", decay_profile(s.diff, n, opt.decay_exponent).sup_constant);
  add("decay-sum", decay_profile(s.sum, n, opt.decay_exponent).sup_constant);
  for (const auto& c : checks) {
    if (c.check_id == "rayleigh-lower-bound" && c.status == Status::evaluated) add("mu1", c.rhs);
  }
  return rows;
}

/// A set plus the labels its report rows carry.
struct NamedSet {
  std::string set_id;
  std::string family;
  OrderedIntSet set;
};

inline NamedSet realize(const GeneratorSpec& spec) {
  try {
    return {set_id(spec), family_key(spec), generate(spec)};
  } catch (const Error& e) {
    throw Error(e.code(), set_id(spec) + ": " + e.what());
  }
}

inline SetReport run_set(const NamedSet& item, const SuiteOptions& opt) {
  SetReport report;
  report.set_id = item.set_id;
  report.family = item.family;
  report.n = item.set.size();
  const auto analysis = analyze(item.set, report.set_id, opt.verify);
  auto append = [&](std::vector<CheckResult> more) {
    for (auto& c : more) report.checks.push_back(std::move(c));
  };
  if (opt.exact) append(check_exact(analysis, opt.verify));
  if (opt.asymptotic) append(check_asymptotic(analysis, opt.verify));
  if (opt.spectral) append(check_spectral_chain(analysis, opt.verify));
  report.summary = summarize(analysis, report.family, report.checks, opt.verify);
  return report;
}

inline SetReport run_set(const GeneratorSpec& spec, const SuiteOptions& opt) {
  return run_set(realize(spec), opt);
}

namespace detail {

// Geometric mean per n, so repeated seeds at one n give one fit point.
inline std::vector<std::pair<double, double>> collapse_by_n(
    const std::vector<std::pair<double, double>>& raw) {
  std::map<double, std::pair<double, int>> acc;
  for (const auto& [x, y] : raw) {
    auto& slot = acc[x];
    slot.first += std::log(y);
    slot.second += 1;
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [x, s] : acc) out.emplace_back(x, std::exp(s.first / s.second));
  return out;
}

inline std::optional<ExponentFit> try_fit(const std::vector<std::pair<double, double>>& raw,
                                          std::string id) {
  auto points = collapse_by_n(raw);
  if (points.size() < 3) return std::nullopt;
  for (const auto& p : points)
    if (!(p.second > 0.0) || !std::isfinite(p.second)) return std::nullopt;
  return fit_exponent(std::move(points), std::move(id));
}

}  // namespace detail

inline const std::vector<std::string>& fitted_quantities() {
  static const std::vector<std::string> q{"sumset", "E2", "E3", "decay-difference", "decay-sum"};
  return q;
}

inline void fit_families(SuiteReport& report, int log_power) {
  std::vector<std::string> families;
  for (const auto& s : report.sets) {
    if (std::find(families.begin(), families.end(), s.family) == families.end()) {
      families.push_back(s.family);
    }
  }
  for (const auto& family : families) {
    for (const auto& q : fitted_quantities()) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& s : report.sets) {
        if (s.family != family) continue;
        for (const auto& row : s.summary)
          if (row.quantity == q) pts.emplace_back(static_cast<double>(s.n), row.value);
      }
      if (auto fit = detail::try_fit(pts, family + ":" + q)) report.fits.push_back(*fit);
    }

    // One ratio per (set, check): the worst τ for scanned checks, the
    // tightest (τ, Δ) record for the spectral chain.
    std::vector<std::string> ids;
    std::map<std::string, Bound> bounds;
    std::map<std::string, std::vector<std::pair<double, double>>> ratios;
    for (const auto& s : report.sets) {
      if (s.family != family) continue;
      for (const auto& c : s.checks) {
        if (c.layer != Layer::asymptotic || c.status != Status::evaluated) continue;
        if (c.check_id.rfind("spectral-", 0) == 0 && !c.tightest) continue;
        if (!(c.ratio > 0.0) || !std::isfinite(c.ratio)) continue;
        if (!bounds.count(c.check_id)) ids.push_back(c.check_id);
        bounds[c.check_id] = c.bound;
        ratios[c.check_id].emplace_back(static_cast<double>(s.n), c.ratio);
      }
    }
    for (const auto& id : ids) {
      const auto& pts = ratios[id];
      RatioTrend trend;
      trend.family = family;
      trend.check_id = id;
      trend.bound = bounds[id];
      trend.min_ratio = pts.front().second;
      trend.max_ratio = pts.front().second;
      std::vector<std::pair<double, double>> adjusted;
      for (const auto& [x, y] : pts) {
        trend.min_ratio = std::min(trend.min_ratio, y);
        trend.max_ratio = std::max(trend.max_ratio, y);
        const double logs = std::pow(std::log(x), log_power);
        adjusted.emplace_back(x, trend.bound == Bound::lower ? y * logs : y / logs);
      }
      auto raw = detail::try_fit(pts, family + ":ratio:" + id);
      auto adj = detail::try_fit(adjusted, family + ":ratio-log:" + id);
      if (!raw || !adj) continue;
      trend.raw = *raw;
      trend.log_adjusted = *adj;
      report.trends.push_back(std::move(trend));
    }
  }
}

/// Runs every layer on every set. An exact-layer failure truncates the
/// report after the first failing set in input order and records that
/// check, so the report is the same for any scheduling.
inline SuiteReport run_suite(const std::vector<NamedSet>& corpus, const SuiteOptions& opt = {},
                             const ParallelFor& parallel = sequential_for) {
  std::vector<SetReport> sets(corpus.size());
  std::vector<std::string> errors(corpus.size());
  std::vector<std::optional<Errc>> codes(corpus.size());
  parallel(corpus.size(), [&](std::size_t i) {
    try {
      sets[i] = run_set(corpus[i], opt);
    } catch (const Error& e) {
      errors[i] = corpus[i].set_id + ": " + e.what();
      codes[i] = e.code();
    } catch (const std::exception& e) {
      errors[i] = corpus[i].set_id + ": " + e.what();
    }
  });
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (errors[i].empty()) continue;
    if (codes[i]) throw Error(*codes[i], errors[i]);
    throw std::runtime_error(errors[i]);
  }

  SuiteReport report;
  for (auto& s : sets) {
    std::optional<CheckResult> failure;
    for (const auto& c : s.checks) {
      if (c.failed()) {
        failure = c;
        break;
      }
    }
    report.sets.push_back(std::move(s));
    if (failure) {
      report.first_failure = std::move(failure);
      report.aborted = true;
      break;
    }
  }
  fit_families(report, opt.log_power);
  return report;
}

/// Validates every spec before any work starts, then generates the corpus.
inline std::vector<NamedSet> realize(const std::vector<GeneratorSpec>& manifest) {
  for (const auto& spec : manifest) validate(spec);
  std::vector<NamedSet> corpus;
  corpus.reserve(manifest.size());
  for (const auto& spec : manifest) corpus.push_back(realize(spec));
  return corpus;
}

inline SuiteReport run_suite(const std::vector<GeneratorSpec>& manifest,
                             const SuiteOptions& opt = {},
                             const ParallelFor& parallel = sequential_for) {
  return run_suite(realize(manifest), opt, parallel);
}

/// Power-law scale that starts close to the rounding-safe regime; the
/// generator's doubling repair covers the remaining factor.
inline double default_power_law_scale(int n, double alpha) {
  return std::pow(static_cast<double>(n), alpha);
}

/// Default corpus: minimal profile and power law (α = 1.5) for
/// n = 16, 32, ..., 2048, power law also at n = 4096, and the
/// Δ⁴ <= 0 random-profile family for n = 16, ..., 512.
inline std::vector<GeneratorSpec> default_corpus() {
  std::vector<GeneratorSpec> out;
  for (int n = 16; n <= 2048; n *= 2) {
    GeneratorSpec minimal;
    minimal.family = Family::minimal_profile;
    minimal.n = n;
    out.push_back(minimal);
  }
  for (int n = 16; n <= 4096; n *= 2) {
    GeneratorSpec power;
    power.family = Family::power_law;
    power.n = n;
    power.params.alpha = 1.5;
    power.params.scale = default_power_law_scale(n, 1.5);
    out.push_back(power);
  }
  for (int n = 16; n <= 512; n *= 2) {
    GeneratorSpec random;
    random.family = Family::random_profile;
    random.n = n;
    random.seed = 1;
    random.params.profile = Profile::concave_fourth;
    out.push_back(random);
  }
  return out;
}

}  // namespace convexlab
