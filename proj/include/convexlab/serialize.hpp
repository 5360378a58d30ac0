#pragma once

/// JSON and CSV encodings of the library's value types.
///
/// Sets are ascending JSON integer arrays. Integers with magnitude
/// >= 2^53 are written as decimal strings so that readers which parse
/// numbers as doubles do not lose precision; readers here accept both.

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "convexlab/energy.hpp"
#include "convexlab/error.hpp"
#include "convexlab/generators.hpp"
#include "convexlab/ordered_set.hpp"
#include "convexlab/search.hpp"
#include "convexlab/spectral.hpp"
#include "convexlab/suite.hpp"
#include "convexlab/verifier.hpp"
#include "json.hpp"

namespace convexlab {

using nlohmann::json;

inline constexpr std::int64_t kJsonSafeInteger = std::int64_t{1} << 53;

inline json integer_to_json(std::int64_t v) {
  if (v >= kJsonSafeInteger || v <= -kJsonSafeInteger) return std::to_string(v);
  return v;
}

inline std::int64_t integer_from_json(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) {
    const auto& text = j.get_ref<const std::string&>();
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty()) {
      throw Error(Errc::config, "not an integer: \"" + text + "\"");
    }
    return v;
  }
  throw Error(Errc::config, "expected an integer, got " + j.dump());
}

inline json wide_to_json(Wide v) {
  if (v < static_cast<Wide>(kJsonSafeInteger)) return static_cast<std::uint64_t>(v);
  return to_string(v);
}

inline json set_to_json(const OrderedIntSet& a) {
  json out = json::array();
  for (auto v : a) out.push_back(integer_to_json(v));
  return out;
}

inline OrderedIntSet set_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::config, "a set must be a JSON array of integers");
  std::vector<std::int64_t> values;
  for (const auto& v : j) values.push_back(integer_from_json(v));
  return make_set(std::move(values));
}

inline OrderedIntSet parse_set(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config, std::string("bad set JSON: ") + e.what());
  }
  return set_from_json(j);
}

inline std::string signature_glyphs(const DerivativeSignature& sig) {
  std::string out;
  for (std::size_t i = 0; i < sig.level_signs.size(); ++i) {
    if (i) out += ",";
    out += glyph(sig.level_signs[i]);
  }
  return out;
}

inline json signature_to_json(const DerivativeSignature& sig) {
  json out = json::array();
  for (auto s : sig.level_signs) out.push_back(std::string(glyph(s)));
  return out;
}

inline json params_to_json(const GeneratorSpec& spec) {
  const auto& p = spec.params;
  json out = json::object();
  switch (spec.family) {
    case Family::from_second_differences: {
      json g = json::array();
      for (auto v : p.second_differences) g.push_back(integer_to_json(v));
      out["g"] = g;
      out["a0"] = integer_to_json(p.a0);
      out["d0"] = integer_to_json(p.d0);
      break;
    }
    case Family::power_law:
      out["alpha"] = p.alpha;
      out["scale"] = p.scale;
      break;
    case Family::random_profile:
      out["profile"] = std::string(to_string(p.profile));
      out["max_step"] = p.max_step;
      out["a0"] = integer_to_json(p.a0);
      out["d0"] = integer_to_json(p.d0);
      break;
    case Family::minimal_profile: break;
  }
  return out;
}

inline json spec_to_json(const GeneratorSpec& spec) {
  return {{"family", std::string(to_string(spec.family))},
          {"n", spec.n},
          {"seed", spec.seed},
          {"params", params_to_json(spec)}};
}

inline GeneratorSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::config, "a generator spec must be a JSON object");
  GeneratorSpec spec;
  try {
    const auto family = parse_family(j.at("family").get<std::string>());
    if (!family) throw Error(Errc::config, "unknown family " + j.at("family").dump());
    spec.family = *family;
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    const json params = j.value("params", json::object());
    auto& p = spec.params;
    if (params.contains("alpha")) p.alpha = params.at("alpha").get<double>();
    if (params.contains("scale")) p.scale = params.at("scale").get<double>();
    if (params.contains("a0")) p.a0 = integer_from_json(params.at("a0"));
    if (params.contains("d0")) p.d0 = integer_from_json(params.at("d0"));
    if (params.contains("max_step")) p.max_step = params.at("max_step").get<std::int64_t>();
    if (params.contains("profile")) {
      const auto profile = parse_profile(params.at("profile").get<std::string>());
      if (!profile) throw Error(Errc::config, "unknown profile " + params.at("profile").dump());
      p.profile = *profile;
    }
    if (params.contains("g")) {
      for (const auto& v : params.at("g")) p.second_differences.push_back(integer_from_json(v));
    }
    if (j.contains("n")) {
      spec.n = j.at("n").get<int>();
    } else if (spec.family == Family::from_second_differences) {
      spec.n = static_cast<int>(p.second_differences.size()) + 2;
    } else {
      throw Error(Errc::config, "generator spec needs n");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("bad generator spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

inline std::vector<GeneratorSpec> manifest_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::config, "a manifest must be a JSON array of specs");
  std::vector<GeneratorSpec> out;
  for (const auto& entry : j) out.push_back(spec_from_json(entry));
  return out;
}

inline json manifest_to_json(const std::vector<GeneratorSpec>& manifest) {
  json out = json::array();
  for (const auto& s : manifest) out.push_back(spec_to_json(s));
  return out;
}

/// {"value": count} with string keys, in ascending key order.
inline json rep_to_json(const RepFunction& rep) {
  json out = json::object();
  for (const auto& e : rep.entries()) out[std::to_string(e.value)] = e.count;
  return out;
}

inline json energy_profile_to_json(const EnergyProfile& p) {
  json out = {{"E2", wide_to_json(p.e2)},
              {"E3", wide_to_json(p.e3)},
              {"T2", wide_to_json(p.t2)},
              {"T4", p.t4 ? wide_to_json(*p.t4) : json(nullptr)},
              {"difference_support", p.difference_support}};
  for (const auto& [k, v] : p.e_fractional) {
    std::ostringstream key;
    key << "E_" << std::setprecision(6) << k;
    out[key.str()] = v;
  }
  return out;
}

inline json slice_to_json(const PopularitySlice& s) {
  json support = json::array();
  for (auto v : s.support) support.push_back(integer_to_json(v));
  return {{"mode", std::string(to_string(s.mode))},
          {"level", s.level},
          {"size", s.size()},
          {"mass", wide_to_json(s.mass)},
          {"source_kind", std::string(to_string(s.source_kind))},
          {"support", support}};
}

inline json decay_to_json(const DecayProfile& d, bool with_counts = false) {
  json out = {{"exponent", d.exponent},
              {"sup_constant", d.sup_constant},
              {"argmax_j", d.argmax_j},
              {"length", d.sorted_counts.size()}};
  if (with_counts) out["sorted_counts"] = d.sorted_counts;
  return out;
}

inline json check_to_json(const CheckResult& r) {
  json out = {{"check_id", r.check_id},
              {"set_id", r.set_id},
              {"layer", std::string(to_string(r.layer))},
              {"bound", std::string(to_string(r.bound))},
              {"status", std::string(to_string(r.status))}};
  if (r.status == Status::evaluated) {
    out["lhs"] = r.lhs;
    out["rhs"] = r.rhs;
    out["ratio"] = r.ratio;
    if (!r.lhs_exact.empty()) out["lhs_exact"] = r.lhs_exact;
    if (!r.rhs_exact.empty()) out["rhs_exact"] = r.rhs_exact;
    out["pass"] = r.pass;
  } else {
    out["pass"] = nullptr;
  }
  if (r.tightest) out["tightest"] = true;
  if (!r.params.empty()) out["params"] = r.params;
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

inline json fit_to_json(const ExponentFit& f) {
  json pts = json::array();
  for (const auto& [n, v] : f.points) pts.push_back({n, v});
  return {{"quantity_id", f.quantity_id},
          {"slope", f.slope},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"points", pts}};
}

inline json trend_to_json(const RatioTrend& t) {
  return {{"family", t.family},
          {"check_id", t.check_id},
          {"bound", std::string(to_string(t.bound))},
          {"min_ratio", t.min_ratio},
          {"max_ratio", t.max_ratio},
          {"slope", t.raw.slope},
          {"slope_log_adjusted", t.log_adjusted.slope},
          {"points", t.raw.points.size()}};
}

inline json search_state_to_json(const SearchState& s) {
  json g = json::array();
  for (auto v : s.g) g.push_back(integer_to_json(v));
  return {{"g", g},
          {"d0", integer_to_json(s.d0)},
          {"score", s.score},
          {"sumset_size", s.sumset_size},
          {"temperature", s.temperature},
          {"rng_state", std::to_string(s.rng_state)}};
}

inline SearchState search_state_from_json(const json& j) {
  SearchState s;
  try {
    for (const auto& v : j.at("g")) s.g.push_back(integer_from_json(v));
    s.d0 = integer_from_json(j.at("d0"));
    s.temperature = j.at("temperature").get<double>();
    s.rng_state = std::stoull(j.at("rng_state").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("bad search state: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(Errc::config, std::string("bad search state: ") + e.what());
  }
  return scored(std::move(s));
}

/// Dense CSV: a header row of column elements, then one row per row
/// element with that element in the first column.
inline std::string matrix_to_csv(const OperatorMatrix& m) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "row";
  for (auto c : m.col_elements) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << m.row_elements[i];
    for (std::size_t j = 0; j < m.cols(); ++j) out << ',' << m(i, j);
    out << '\n';
  }
  return out.str();
}

/// 64-bit FNV-1a, used to stamp outputs with the configuration they came from.
inline std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace convexlab
