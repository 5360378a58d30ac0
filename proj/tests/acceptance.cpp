// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "convexlab/convexlab.hpp"
#include "convexlab/serialize.hpp"

using namespace convexlab;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kOracleSets = 100;
constexpr int kOracleMaxN = 10;
constexpr int kT4Sets = 30;
constexpr int kT4MaxN = 6;
constexpr double kOracleSeconds = 60.0;
constexpr double kDecaySlopeMax = 0.05;
constexpr double kSumsetSlopeMin = 1.5 - 0.03;
constexpr double kTheoremRatioSlopeMin = -0.05;
constexpr double kEnergySlopeMax = 328.0 / 137.0 + 0.05;
constexpr double kSuiteSeconds = 300.0;
constexpr int kSearchSeeds = 10;
constexpr long kSearchSteps = 1000;
constexpr std::int64_t kSearchCeiling = 10;
constexpr std::size_t kSearchMinimum = 9;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << "criterion " << id << " " << name << ": " << (ok ? "PASS" : "FAIL") << " (" << detail
            << ")" << std::endl;
  failures += ok ? 0 : 1;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << std::fixed << v;
  return s.str();
}

OrderedIntSet random_set(SplitMix64& rng, int n, std::int64_t span) {
  std::set<std::int64_t> s;
  while (static_cast<int>(s.size()) < n) s.insert(rng.between(-span, span));
  return make_set(std::vector<std::int64_t>(s.begin(), s.end()));
}

void criterion_oracles() {
  const auto t0 = Clock::now();
  SplitMix64 rng(0xacce97);
  int mismatches = 0;
  for (int i = 0; i < kOracleSets; ++i) {
    const auto a = random_set(rng, 1 + static_cast<int>(rng.below(kOracleMaxN)), 25);
    const auto b = random_set(rng, 1 + static_cast<int>(rng.below(kOracleMaxN)), 25);
    const auto d = difference_rep(a, a);
    mismatches += energy_exact(d, 2) != brute_force_energy(a, a, 2);
    mismatches += energy_exact(d, 3) != brute_force_energy(a, a, 3);
    mismatches += cross_energy(a, b, 2) != brute_force_energy(a, b, 2);
    mismatches += cross_energy(a, b, 3) != brute_force_energy(a, b, 3);
  }
  const bool binomial = t_energy(make_set({0, 1}), 4) == 70 && brute_force_t(make_set({0, 1}), 4) == 70;
  for (int i = 0; i < kT4Sets; ++i) {
    const auto a = random_set(rng, 1 + static_cast<int>(rng.below(kT4MaxN)), 25);
    mismatches += t_energy(a, 4) != brute_force_t(a, 4);
  }
  const double secs = seconds_since(t0);
  report(1, "oracle-equivalence", mismatches == 0 && binomial && secs <= kOracleSeconds,
         std::to_string(kOracleSets) + " sets n<=" + std::to_string(kOracleMaxN) + " for E2/E3/E(A,B), " +
             std::to_string(kT4Sets) + " sets n<=" + std::to_string(kT4MaxN) + " for T4, mismatches " +
             std::to_string(mismatches) + ", T4({0,1})=70 " + (binomial ? "ok" : "wrong") + ", " +
             fmt(secs, 2) + "s <= " + fmt(kOracleSeconds, 0) + "s");
}

struct CorpusRun {
  std::vector<NamedSet> corpus;
  SuiteReport report;
};

void criterion_exact(const CorpusRun& run) {
  const auto failures_found = run.report.exact_failures();
  std::size_t evaluated = 0, skipped = 0;
  for (const auto& s : run.report.sets)
    for (const auto& c : s.checks) {
      if (c.layer != Layer::exact) continue;
      evaluated += c.status == Status::evaluated;
      skipped += c.status == Status::skipped;
    }

  auto mutant = analyze(minimal_profile(16), "mutant");
  std::vector<RepEntry> entries(mutant.diff.entries().begin(), mutant.diff.entries().end());
  entries[entries.size() / 3].count += 1;
  mutant.diff = RepFunction(RepKind::difference, 2, entries);
  std::size_t mutant_failures = 0;
  for (const auto& c : check_exact(mutant)) mutant_failures += c.failed();

  const bool ok = failures_found == 0 && !run.report.aborted && mutant_failures >= 1 &&
                  run.report.sets.size() == run.corpus.size();
  report(2, "exact-layer", ok,
         std::to_string(run.corpus.size()) + " sets, " + std::to_string(evaluated) +
             " exact checks evaluated, " + std::to_string(skipped) + " budget skips, " +
             std::to_string(failures_found) + " failures; mutation produced " +
             std::to_string(mutant_failures) + " failures (need >= 1)");
}

void criterion_pigeonhole(const CorpusRun& run) {
  std::size_t violations = 0;
  for (const auto& item : run.corpus) {
    const auto rep = difference_rep(item.set, item.set);
    const auto heavy = heaviest_slice(rep, 1, static_cast<double>(rep.max_count()));
    const Wide lhs = checked_mul(heavy.mass, static_cast<Wide>(pigeonhole_band_bound(rep)));
    violations += lhs < energy_exact(rep, 2);
  }
  report(3, "pigeonhole", violations == 0,
         "heaviest band mass * (ceil(log2 max)+1) >= E on " + std::to_string(run.corpus.size()) +
             " sets, violations " + std::to_string(violations) + ", zero tolerance");
}

// Per-n values of `quantity` for the power-law family with n >= min_n.
std::vector<std::pair<double, double>> power_law_points(const SuiteReport& r, const std::string& quantity,
                                                        std::size_t min_n) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : r.sets)
    for (const auto& row : s.summary)
      if (row.family == "power-law" && row.quantity == quantity && row.n >= min_n)
        pts.emplace_back(static_cast<double>(row.n), row.value);
  return pts;
}

void criterion_decay(const CorpusRun& run) {
  const auto diff = fit_exponent(power_law_points(run.report, "decay-difference", 64));
  const auto sum = fit_exponent(power_law_points(run.report, "decay-sum", 64));
  const bool ok = diff.slope <= kDecaySlopeMax && sum.slope <= kDecaySlopeMax;
  report(4, "decay-boundedness", ok,
         "power-law(1.5) n=" + fmt(diff.points.front().first, 0) + ".." + fmt(diff.points.back().first, 0) +
             ", slope difference " + fmt(diff.slope) + ", slope sum " + fmt(sum.slope) + ", limit " +
             fmt(kDecaySlopeMax, 2));
}

void criterion_exponents(const CorpusRun& run) {
  const auto sumset = fit_exponent(power_law_points(run.report, "sumset", 64));
  auto ratio_pts = sumset.points;
  for (auto& [n, v] : ratio_pts) v /= std::pow(n, 221.0 / 137.0);
  const auto ratio = fit_exponent(ratio_pts);
  const auto e2 = fit_exponent(power_law_points(run.report, "E2", 64));
  const bool ok = sumset.slope >= kSumsetSlopeMin && ratio.slope >= kTheoremRatioSlopeMin &&
                  e2.slope <= kEnergySlopeMax;
  report(5, "exponent-sanity", ok,
         "|A+A| slope " + fmt(sumset.slope) + " >= " + fmt(kSumsetSlopeMin, 2) + ", |A+A|/n^(221/137) slope " +
             fmt(ratio.slope) + " >= " + fmt(kTheoremRatioSlopeMin, 2) + ", E slope " + fmt(e2.slope) +
             " <= " + fmt(kEnergySlopeMax));
}

void criterion_spectral(const CorpusRun& run) {
  std::size_t evaluated = 0, empty_range = 0, skipped = 0, bad = 0;
  for (const auto& s : run.report.sets) {
    if (s.n < 16) continue;
    for (const auto& c : s.checks) {
      if (c.check_id.rfind("spectral-", 0) != 0) continue;
      switch (c.status) {
        case Status::evaluated:
          ++evaluated;
          bad += !(std::isfinite(c.ratio) && c.ratio > 0.0);
          break;
        case Status::not_applicable:
          ++empty_range;
          bad += c.note.find("empty-range") == std::string::npos;
          break;
        case Status::skipped:
          ++skipped;
          bad += c.note.empty();
          break;
      }
    }
  }
  report(6, "spectral-well-defined", bad == 0 && evaluated > 0,
         std::to_string(evaluated) + " finite positive ratios, " + std::to_string(empty_range) +
             " marked empty-range, " + std::to_string(skipped) + " marked budget-skipped, " +
             std::to_string(bad) + " malformed");
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(CONVEXLAB_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "<popen failed>";
  std::string out;
  std::array<char, 65536> buf{};
  while (auto n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) out += "<exit " + std::to_string(status) + ">";
  return out;
}

void criterion_determinism() {
  const auto manifest = std::filesystem::temp_directory_path() / "convexlab-acceptance-manifest.json";
  std::vector<GeneratorSpec> specs;
  for (int n : {16, 32, 64, 128}) {
    specs.push_back({Family::minimal_profile, n, 0, {}});
    GeneratorSpec p{Family::power_law, n, 0, {}};
    p.params.scale = default_power_law_scale(n, 1.5);
    specs.push_back(p);
  }
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    GeneratorSpec r{Family::random_profile, 48, seed, {}};
    r.params.profile = Profile::concave_fourth;
    specs.push_back(r);
  }
  std::ofstream(manifest) << manifest_to_json(specs).dump();
  const auto one = run_cli("verify --manifest " + manifest.string() + " --seed 7 --jobs 1");
  const auto eight = run_cli("verify --manifest " + manifest.string() + " --seed 7 --jobs 8");
  std::size_t rows = 0;
  for (char c : one) rows += c == '\n';
  const bool ok = one == eight && rows > 0 && one.find("<exit") == std::string::npos;
  report(7, "determinism", ok,
         std::to_string(specs.size()) + "-set manifest, " + std::to_string(rows) + " JSONL rows, --jobs 1 vs 8 " +
             (one == eight ? "byte-identical" : "DIFFER"));
}

void criterion_search() {
  SearchConfig c;
  c.ceiling = kSearchCeiling;
  const auto exhaustive = exhaustive_minimum(4, kSearchCeiling).sumset_size;
  int found = 0;
  for (std::uint64_t seed = 0; seed < kSearchSeeds; ++seed) {
    const auto r = anneal(random_state(4, seed, c), kSearchSteps, c);
    found += r.best.sumset_size == kSearchMinimum;
  }
  report(9, "search-cross-check", exhaustive == kSearchMinimum && found == kSearchSeeds,
         "exhaustive min |A+A| at n=4 over ceiling " + std::to_string(kSearchCeiling) + " is " +
             std::to_string(exhaustive) + ", annealing reached " + std::to_string(kSearchMinimum) + " in " +
             std::to_string(found) + "/" + std::to_string(kSearchSeeds) + " seeds within " +
             std::to_string(kSearchSteps) + " steps");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_oracles();

  CorpusRun run;
  run.corpus = realize(default_corpus());
  const auto suite_t0 = Clock::now();
  run.report = run_suite(run.corpus);
  std::cout << "  default corpus: " << run.corpus.size() << " sets in " << fmt(seconds_since(suite_t0), 1)
            << "s" << std::endl;

  criterion_exact(run);
  criterion_pigeonhole(run);
  criterion_decay(run);
  criterion_exponents(run);
  criterion_spectral(run);
  const double suite_secs = seconds_since(t0);

  criterion_determinism();
  report(8, "desk-scale-runtime", suite_secs <= kSuiteSeconds,
         "criteria 1-6 took " + fmt(suite_secs, 1) + "s <= " + fmt(kSuiteSeconds, 0) + "s, single thread");
  criterion_search();

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
