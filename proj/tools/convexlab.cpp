// convexlab: generate convex sets, compute their additive energies, and run
// the inequality catalog over a corpus.
//
// Exit codes: 0 success, 1 exact-layer failure, 2 configuration error,
// 3 any other runtime error (budget, arithmetic, non-convergence).

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "convexlab/convexlab.hpp"
#include "convexlab/serialize.hpp"
#include "parallel.hpp"

namespace {

using namespace convexlab;

constexpr int kExitOk = 0;
constexpr int kExitExactFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunConfig {
  std::string subcommand;
  std::string manifest_path;
  std::string set_json;
  bool default_corpus = false;
  std::string family = "minimal-profile";
  int n = 4;
  std::optional<std::uint64_t> seed;
  double alpha = 1.5;
  std::optional<double> scale;
  std::string profile = "d2+d3-";
  std::string g;
  std::int64_t max_step = 4;
  std::string format;
  std::string out;
  std::size_t jobs = 1;
  std::uint64_t budget_pairs = Budget{}.pairs;
  std::uint64_t budget_matrix = Budget{}.matrix;
  std::size_t t4_max_n = 128;
  std::optional<std::uint64_t> tau;
  std::vector<double> k;
  long steps = 1000;
  int chains = 1;
  std::int64_t ceiling = 1000;
  std::string checkpoint;
  std::string points;
  int log_power = 1;

  Budget budget() const {
    Budget b;
    b.pairs = budget_pairs;
    b.matrix = budget_matrix;
    return b;
  }
};

std::uint64_t effective_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("CONVEXLAB_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::config, "CONVEXLAB_SEED is not an unsigned integer");
  }
  return 0;
}

GeneratorSpec inline_spec(const RunConfig& cfg) {
  const auto family = parse_family(cfg.family);
  if (!family) throw Error(Errc::config, "unknown family '" + cfg.family + "'");
  GeneratorSpec spec;
  spec.family = *family;
  spec.n = cfg.n;
  spec.seed = effective_seed(cfg);
  spec.params.alpha = cfg.alpha;
  spec.params.scale = cfg.scale.value_or(default_power_law_scale(cfg.n, cfg.alpha));
  spec.params.max_step = cfg.max_step;
  const auto profile = parse_profile(cfg.profile);
  if (!profile) throw Error(Errc::config, "unknown profile '" + cfg.profile + "'");
  spec.params.profile = *profile;
  if (!cfg.g.empty()) {
    const auto g = json::parse(cfg.g, nullptr, false);
    if (g.is_discarded() || !g.is_array()) throw Error(Errc::config, "--g must be a JSON array");
    for (const auto& v : g) spec.params.second_differences.push_back(integer_from_json(v));
    spec.n = static_cast<int>(spec.params.second_differences.size()) + 2;
  }
  validate(spec);
  return spec;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot read " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::config, path + " is not valid JSON");
  return j;
}

/// Specs named by the configuration; empty when a literal set is given.
std::vector<GeneratorSpec> resolve_specs(const RunConfig& cfg) {
  if (!cfg.manifest_path.empty()) return manifest_from_json(read_json_file(cfg.manifest_path));
  if (cfg.default_corpus) return default_corpus();
  if (!cfg.set_json.empty()) return {};
  return {inline_spec(cfg)};
}

std::vector<NamedSet> resolve_corpus(const RunConfig& cfg) {
  if (cfg.manifest_path.empty() && !cfg.default_corpus && !cfg.set_json.empty()) {
    return {{"inline", "inline", parse_set(cfg.set_json)}};
  }
  return realize(resolve_specs(cfg));
}

std::string canonical_config(const RunConfig& cfg) {
  json j = {{"subcommand", cfg.subcommand},
            {"seed", effective_seed(cfg)},
            {"format", cfg.format},
            {"budget_pairs", cfg.budget_pairs},
            {"budget_matrix", cfg.budget_matrix},
            {"t4_max_n", cfg.t4_max_n},
            {"log_power", cfg.log_power}};
  if (!cfg.set_json.empty()) j["set"] = set_to_json(parse_set(cfg.set_json));
  if (cfg.subcommand != "search" && cfg.subcommand != "fit") {
    if (cfg.set_json.empty() || !cfg.manifest_path.empty() || cfg.default_corpus) {
      j["manifest"] = manifest_to_json(resolve_specs(cfg));
    }
  }
  if (cfg.tau) j["tau"] = *cfg.tau;
  if (!cfg.k.empty()) j["k"] = cfg.k;
  if (cfg.subcommand == "search") {
    j["n"] = cfg.n;
    j["steps"] = cfg.steps;
    j["chains"] = cfg.chains;
    j["ceiling"] = cfg.ceiling;
  }
  if (!cfg.points.empty()) j["points"] = cfg.points;
  return j.dump();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(Errc::config, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string csv_number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

template <typename Body>
void for_each_parallel(const RunConfig& cfg, std::size_t count, Body&& body) {
  tools::parallel_for(cfg.jobs, count, body);
}

int run_gen(const RunConfig& cfg) {
  Output out(cfg.out);
  if (cfg.manifest_path.empty() && !cfg.default_corpus) {
    out.stream() << set_to_json(generate(inline_spec(cfg))).dump() << '\n';
    return kExitOk;
  }
  const auto specs = resolve_specs(cfg);
  const auto corpus = realize(specs);
  json all = json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    all.push_back({{"set_id", corpus[i].set_id},
                   {"spec", spec_to_json(specs[i])},
                   {"set", set_to_json(corpus[i].set)}});
  }
  out.stream() << all.dump() << '\n';
  return kExitOk;
}

json stats_record(const NamedSet& item, const RunConfig& cfg, const std::string& hash) {
  std::vector<double> fractional{kEightThirds};
  for (double k : cfg.k) fractional.push_back(k);
  const auto profile = energy_profile(item.set, cfg.budget(), cfg.t4_max_n, fractional);
  json rec = energy_profile_to_json(profile);
  rec["set_id"] = item.set_id;
  rec["config_hash"] = hash;
  rec["n"] = item.set.size();
  rec["sumset"] = sumset(item.set, item.set).size();
  rec["diffset"] = profile.difference_support;
  rec["signature"] = signature_to_json(available_signature(item.set, 4));
  return rec;
}

int run_stats(const RunConfig& cfg, const std::string& hash) {
  const auto corpus = resolve_corpus(cfg);
  std::vector<json> records(corpus.size());
  for_each_parallel(cfg, corpus.size(),
                    [&](std::size_t i) { records[i] = stats_record(corpus[i], cfg, hash); });
  Output out(cfg.out);
  if (cfg.format == "csv") {
    out.stream() << "set_id,config_hash,n,sumset,diffset,E2,E3,T2,T4,signature\n";
    for (const auto& r : records) {
      out.stream() << r["set_id"].get<std::string>() << ',' << hash << ',' << r["n"] << ','
                   << r["sumset"] << ',' << r["diffset"] << ',' << r["E2"] << ',' << r["E3"]
                   << ',' << r["T2"] << ',' << r["T4"] << ",\"";
      const auto& sig = r["signature"];
      for (std::size_t i = 0; i < sig.size(); ++i) {
        out.stream() << (i ? " " : "") << sig[i].get<std::string>();
      }
      out.stream() << "\"\n";
    }
  } else if (records.size() == 1 && cfg.format != "jsonl") {
    out.stream() << records.front().dump() << '\n';
  } else {
    for (const auto& r : records) out.stream() << r.dump() << '\n';
  }
  return kExitOk;
}

SuiteOptions suite_options(const RunConfig& cfg) {
  SuiteOptions opt;
  opt.verify.budget = cfg.budget();
  opt.verify.t4_max_n = cfg.t4_max_n;
  opt.log_power = cfg.log_power;
  return opt;
}

void write_summary_csv(std::ostream& out, const SuiteReport& report, const std::string& hash) {
  out << "family,set_id,n,quantity,value,config_hash\n";
  for (const auto& s : report.sets)
    for (const auto& row : s.summary)
      out << row.family << ',' << row.set_id << ',' << row.n << ',' << row.quantity << ','
          << csv_number(row.value) << ',' << hash << '\n';
}

int run_verify(const RunConfig& cfg, const std::string& hash) {
  const auto corpus = resolve_corpus(cfg);
  const auto report = run_suite(corpus, suite_options(cfg),
                                [&](std::size_t count, const std::function<void(std::size_t)>& f) {
                                  tools::parallel_for(cfg.jobs, count, f);
                                });
  Output out(cfg.out);
  if (cfg.format == "csv") {
    write_summary_csv(out.stream(), report, hash);
  } else {
    for (const auto& s : report.sets) {
      for (const auto& c : s.checks) {
        auto j = check_to_json(c);
        j["config_hash"] = hash;
        out.stream() << j.dump() << '\n';
      }
    }
    for (const auto& f : report.fits) {
      auto j = fit_to_json(f);
      j["record"] = "exponent-fit";
      j["config_hash"] = hash;
      out.stream() << j.dump() << '\n';
    }
    for (const auto& t : report.trends) {
      auto j = trend_to_json(t);
      j["record"] = "ratio-trend";
      j["config_hash"] = hash;
      out.stream() << j.dump() << '\n';
    }
    if (!cfg.out.empty()) {
      std::ofstream summary(cfg.out + ".summary.csv", std::ios::binary);
      write_summary_csv(summary, report, hash);
    }
  }
  if (report.first_failure) {
    std::cerr << "exact-layer failure: " << check_to_json(*report.first_failure).dump() << '\n';
    return kExitExactFailure;
  }
  return kExitOk;
}

int run_scan(const RunConfig& cfg, const std::string& hash) {
  const auto corpus = resolve_corpus(cfg);
  std::vector<std::vector<json>> rows(corpus.size());
  for_each_parallel(cfg, corpus.size(), [&](std::size_t i) {
    const auto& item = corpus[i];
    const auto diff = difference_rep(item.set, item.set, cfg.budget());
    const auto sum = sum_rep(item.set, item.set, cfg.budget());
    auto emit = [&](const PopularitySlice& s) {
      auto j = slice_to_json(s);
      if (s.size() > 64) j.erase("support");
      j["set_id"] = item.set_id;
      j["config_hash"] = hash;
      rows[i].push_back(std::move(j));
    };
    for (const auto* rep : {&diff, &sum}) {
      for (const auto& band : dyadic_slices(*rep)) emit(band);
    }
    if (cfg.tau) {
      emit(popularity_set(diff, *cfg.tau));
    } else {
      for (auto tau : dyadic_levels(diff)) emit(popularity_set(diff, tau));
    }
  });
  Output out(cfg.out);
  if (cfg.format == "csv") {
    out.stream() << "set_id,config_hash,source_kind,mode,level,size,mass\n";
    for (const auto& per_set : rows)
      for (const auto& r : per_set)
        out.stream() << r["set_id"].get<std::string>() << ',' << hash << ','
                     << r["source_kind"].get<std::string>() << ',' << r["mode"].get<std::string>()
                     << ',' << r["level"] << ',' << r["size"] << ',' << r["mass"] << '\n';
  } else {
    for (const auto& per_set : rows)
      for (const auto& r : per_set) out.stream() << r.dump() << '\n';
  }
  return kExitOk;
}

int run_fit(const RunConfig& cfg, const std::string& hash) {
  Output out(cfg.out);
  std::vector<ExponentFit> fits;
  if (!cfg.points.empty()) {
    const auto j = json::parse(cfg.points, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
      throw Error(Errc::config, "--points must be a JSON array of [n, value] pairs");
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j) {
      if (!p.is_array() || p.size() != 2) throw Error(Errc::config, "each point is [n, value]");
      pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    try {
      fits.push_back(fit_exponent(pts, "points"));
    } catch (const Error& e) {
      throw Error(Errc::config, e.what());
    }
  } else {
    auto opt = suite_options(cfg);
    opt.exact = opt.asymptotic = opt.spectral = false;
    const auto report = run_suite(resolve_corpus(cfg), opt,
                                  [&](std::size_t count, const std::function<void(std::size_t)>& f) {
                                    tools::parallel_for(cfg.jobs, count, f);
                                  });
    fits = report.fits;
  }
  if (cfg.format == "csv") {
    out.stream() << "quantity_id,slope,intercept,r_squared,points,config_hash\n";
    for (const auto& f : fits)
      out.stream() << f.quantity_id << ',' << csv_number(f.slope) << ','
                   << csv_number(f.intercept) << ',' << csv_number(f.r_squared) << ','
                   << f.points.size() << ',' << hash << '\n';
  } else {
    for (const auto& f : fits) {
      auto j = fit_to_json(f);
      j["config_hash"] = hash;
      out.stream() << j.dump() << '\n';
    }
  }
  return kExitOk;
}

int run_eigen(const RunConfig& cfg, const std::string& hash) {
  const auto corpus = resolve_corpus(cfg);
  if (cfg.format == "csv") {
    // Dense matrix export of T^{A∘A}_{A,A}; one set only.
    if (corpus.size() != 1) throw Error(Errc::config, "matrix CSV export needs exactly one set");
    const auto& a = corpus.front().set;
    Output out(cfg.out);
    out.stream() << matrix_to_csv(operator_matrix(a, a, difference_rep(a, a, cfg.budget()),
                                                  OperatorMode::difference, cfg.budget()));
    return kExitOk;
  }
  std::vector<json> records(corpus.size());
  for_each_parallel(cfg, corpus.size(), [&](std::size_t i) {
    const auto& a = corpus[i].set;
    const auto diff = difference_rep(a, a, cfg.budget());
    const auto m = operator_matrix(a, a, diff, OperatorMode::difference, cfg.budget());
    const double mu = principal_eigenvalue(m);
    const double lower = to_double(energy_exact(diff, 2)) / static_cast<double>(a.size());
    records[i] = {{"set_id", corpus[i].set_id}, {"config_hash", hash},
                  {"n", a.size()},              {"symmetric", m.is_symmetric()},
                  {"mu1", mu},                  {"rayleigh_lower", lower},
                  {"ratio", lower / mu}};
  });
  Output out(cfg.out);
  for (const auto& r : records) out.stream() << r.dump() << '\n';
  return kExitOk;
}

int run_search(const RunConfig& cfg, const std::string& hash) {
  SearchConfig sc;
  sc.ceiling = cfg.ceiling;
  const auto base_seed = effective_seed(cfg);
  std::vector<ChainOutcome> chains;
  if (!cfg.checkpoint.empty() && std::ifstream(cfg.checkpoint).good()) {
    // Resume every chain from its saved position.
    const auto saved = read_json_file(cfg.checkpoint);
    const auto& list = saved.at("chains");
    chains.resize(list.size());
    for_each_parallel(cfg, list.size(), [&](std::size_t i) {
      const auto last = search_state_from_json(list[i].at("last"));
      const auto prior_best = search_state_from_json(list[i].at("best"));
      auto result = anneal(last, cfg.steps, sc);
      if (prior_best.score <= result.best.score) result.best = prior_best;
      chains[i] = {list[i].at("seed").get<std::uint64_t>(), result};
    });
  } else {
    if (cfg.chains < 1) throw Error(Errc::config, "--chains must be >= 1");
    std::vector<std::uint64_t> seeds;
    for (int c = 0; c < cfg.chains; ++c) seeds.push_back(base_seed + static_cast<std::uint64_t>(c));
    chains = run_chains(cfg.n, seeds, cfg.steps, sc,
                        [&](std::size_t count, const std::function<void(std::size_t)>& f) {
                          tools::parallel_for(cfg.jobs, count, f);
                        });
  }
  if (!cfg.checkpoint.empty()) {
    json saved = {{"config_hash", hash}, {"chains", json::array()}};
    for (const auto& c : chains) {
      saved["chains"].push_back({{"seed", c.seed},
                                 {"best", search_state_to_json(c.result.best)},
                                 {"last", search_state_to_json(c.result.last)}});
    }
    std::ofstream(cfg.checkpoint, std::ios::binary) << saved.dump(2) << '\n';
  }
  const auto& winner = best_chain(chains);
  Output out(cfg.out);
  if (cfg.format == "json" || cfg.format == "jsonl") {
    for (const auto& c : chains) {
      json j = search_state_to_json(c.result.best);
      j["seed"] = c.seed;
      j["n"] = c.result.best.n();
      j["winner"] = &c == &winner;
      j["set"] = set_to_json(c.result.best.set());
      j["config_hash"] = hash;
      out.stream() << j.dump() << '\n';
    }
  } else {
    out.stream() << "n,best_score,sumset,g,d0,seed,config_hash\n";
    for (const auto& c : chains) {
      const auto& b = c.result.best;
      out.stream() << b.n() << ',' << csv_number(b.score) << ',' << b.sumset_size << ",\"";
      for (std::size_t i = 0; i < b.g.size(); ++i) out.stream() << (i ? " " : "") << b.g[i];
      out.stream() << "\"," << b.d0 << ',' << c.seed << ',' << hash << '\n';
    }
  }
  return kExitOk;
}

int dispatch(const RunConfig& cfg) {
  const auto hash = config_hash(canonical_config(cfg));
  if (cfg.subcommand == "gen") return run_gen(cfg);
  if (cfg.subcommand == "stats") return run_stats(cfg, hash);
  if (cfg.subcommand == "verify") return run_verify(cfg, hash);
  if (cfg.subcommand == "scan") return run_scan(cfg, hash);
  if (cfg.subcommand == "fit") return run_fit(cfg, hash);
  if (cfg.subcommand == "eigen") return run_eigen(cfg, hash);
  if (cfg.subcommand == "search") return run_search(cfg, hash);
  throw Error(Errc::config, "unknown subcommand " + cfg.subcommand);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"convexlab: additive energies and sumset bounds for convex integer sets"};
  app.require_subcommand(1, 1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--manifest", cfg.manifest_path, "JSON array of generator specs");
    sub->add_option("--set", cfg.set_json, "literal set as a JSON integer array");
    sub->add_flag("--default-corpus", cfg.default_corpus, "use the built-in default corpus");
    sub->add_option("--family", cfg.family,
                    "minimal-profile | power-law | random-profile | from-second-differences");
    sub->add_option("--n", cfg.n, "cardinality");
    sub->add_option("--seed", cfg.seed, "64-bit seed (fallback: $CONVEXLAB_SEED, then 0)");
    sub->add_option("--alpha", cfg.alpha, "power-law exponent in (1, 2)");
    sub->add_option("--scale", cfg.scale, "power-law scale (default n^alpha)");
    sub->add_option("--profile", cfg.profile, "random-profile: d2+ | d2+d3- | d2+d3-d4<=0");
    sub->add_option("--g", cfg.g, "from-second-differences: JSON array of Δ² values");
    sub->add_option("--max-step", cfg.max_step, "random-profile sampling range");
    sub->add_option("--format", cfg.format, "json | jsonl | csv");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--budget-pairs", cfg.budget_pairs, "pair/tuple enumeration budget")
        ->check(CLI::PositiveNumber);
    sub->add_option("--budget-matrix", cfg.budget_matrix, "operator matrix entry budget")
        ->check(CLI::PositiveNumber);
    sub->add_option("--t4-max-n", cfg.t4_max_n, "largest n for which T_4 is computed");
    sub->add_option("--tau", cfg.tau, "popularity threshold")->check(CLI::PositiveNumber);
    sub->add_option("--k", cfg.k, "extra energy exponents (>= 1)");
    sub->add_option("--log-power", cfg.log_power, "log^d allowance in ratio trends");
  };

  for (auto [name, help] : {std::pair{"gen", "generate sets (corpus JSON)"},
                            std::pair{"stats", "energies, |A±A| and derivative signature"},
                            std::pair{"verify", "run the inequality catalog (JSON lines)"},
                            std::pair{"scan", "dyadic bands and popularity sets"},
                            std::pair{"fit", "log-log exponent fits"},
                            std::pair{"eigen", "principal eigenvalue of T^{A∘A}_{A,A}"},
                            std::pair{"search", "simulated annealing for small |A+A|"}}) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    sub->callback([&cfg, name = std::string(name)] { cfg.subcommand = name; });
    if (cfg.subcommand.empty() && std::string(name) == "search") {
      sub->add_option("--steps", cfg.steps, "annealing steps per chain");
      sub->add_option("--chains", cfg.chains, "independent chains (seeds seed, seed+1, ...)");
      sub->add_option("--ceiling", cfg.ceiling, "upper bound for g entries and d0");
      sub->add_option("--checkpoint", cfg.checkpoint, "resumable chain state (JSON)");
    }
    if (std::string(name) == "fit") {
      sub->add_option("--points", cfg.points, "inline JSON [[n, value], ...]");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    return dispatch(cfg);
  } catch (const Error& e) {
    std::cerr << "convexlab: " << e.what() << '\n';
    return e.code() == Errc::config ? kExitConfig : kExitRuntime;
  } catch (const json::exception& e) {
    std::cerr << "convexlab: bad JSON input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "convexlab: " << e.what() << '\n';
    return kExitRuntime;
  }
}
