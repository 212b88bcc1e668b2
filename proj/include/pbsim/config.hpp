#pragma once

// JSON run configuration.
//
//   {
//     "name": "fig3",
//     "description": "free text, ignored",
//     "model": "one_cavity" | "two_cavity_reduced" | "two_cavity_full",
//     "params": { "<field>": number, ..., "n_trunc": integer },
//     "MHz_over_2pi": { "kappa": 5.0, "<field>": value_in_MHz, ... },
//     "sweep": { "axis": "<field or t>", "range": [lo, hi], "points": n },
//     "solver": { "dim_cap": 64, "refine_tol": 1e-5, "boundary_tol": 1e-4,
//                 "occupation_floor": 1e-12, "step": 0, "phase_per_step": 0.02 },
//     "outputs": ["mean_phonon", "g2", "g3", "g4", "region"],
//     "runs": [ { "name": "...", <any of the keys above, merged over the base> }, ... ]
//   }
//
// All rates are in units of kappa unless listed under "MHz_over_2pi", where
// they are divided by the "kappa" entry of that block. Without "runs" the
// document describes a single sweep.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pbsim/errors.hpp"
#include "pbsim/sweep.hpp"

#ifndef PBSIM_PRESET_DIR
#define PBSIM_PRESET_DIR "config/presets"
#endif

namespace pbsim {

using json = nlohmann::json;

namespace detail {

inline void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

inline double number_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline SweepSpec parse_single(const json& j) {
  require_keys(j, {"name", "description", "model", "params", "MHz_over_2pi", "sweep", "solver", "outputs"}, "config");
  SweepSpec spec;
  spec.name = j.value("name", std::string("sweep"));
  const std::string where = "config '" + spec.name + "'";

  if (!j.contains("model") || !j["model"].is_string()) throw ConfigError(where + ": missing 'model'");
  const auto model = model_from_string(j["model"].get<std::string>());
  if (!model) throw ConfigError(where + ": unknown model '" + j["model"].get<std::string>() + "'");
  spec.fixed.model = *model;

  std::vector<std::pair<std::string, double>> values;
  if (j.contains("params")) {
    const auto& params = j["params"];
    if (!params.is_object()) throw ConfigError(where + ": 'params' must be an object");
    for (const auto& [key, value] : params.items()) {
      if (key == "n_trunc") {
        if (!value.is_number_integer() || value.get<long>() < 2)
          throw ConfigError(where + ": n_trunc must be an integer >= 2");
        spec.fixed.one.n_trunc = spec.fixed.two.n_trunc = value.get<std::size_t>();
        continue;
      }
      values.emplace_back(key, number_at(params, key, where + " params"));
    }
  }
  if (j.contains("MHz_over_2pi")) {
    const auto& mhz = j["MHz_over_2pi"];
    if (!mhz.is_object() || !mhz.contains("kappa"))
      throw ConfigError(where + ": 'MHz_over_2pi' needs a 'kappa' entry");
    const double kappa_mhz = number_at(mhz, "kappa", where + " MHz_over_2pi");
    for (const auto& [key, value] : mhz.items()) {
      if (key == "kappa") continue;
      try {
        values.emplace_back(key, mhz_over_2pi_to_kappa(number_at(mhz, key, where + " MHz_over_2pi"), kappa_mhz));
      } catch (const InvalidParameter& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
  }
  // g_prime depends on the other two-cavity fields, so it goes last.
  std::stable_partition(values.begin(), values.end(), [](const auto& kv) { return kv.first != "g_prime"; });
  for (const auto& [key, value] : values) {
    try {
      set_parameter(spec.fixed, key, value);
    } catch (const InvalidParameter& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  if (!j.contains("sweep")) throw ConfigError(where + ": missing 'sweep'");
  const auto& sweep = j["sweep"];
  require_keys(sweep, {"axis", "range", "points"}, where + " sweep");
  if (!sweep.contains("axis") || !sweep["axis"].is_string()) throw ConfigError(where + ": sweep needs an 'axis'");
  spec.axis = sweep["axis"].get<std::string>();
  if (!sweep.contains("range") || !sweep["range"].is_array() || sweep["range"].size() != 2 ||
      !sweep["range"][0].is_number() || !sweep["range"][1].is_number())
    throw ConfigError(where + ": sweep 'range' must be [lo, hi]");
  spec.lo = sweep["range"][0].get<double>();
  spec.hi = sweep["range"][1].get<double>();
  if (!sweep.contains("points") || !sweep["points"].is_number_integer() || sweep["points"].get<long>() < 2)
    throw ConfigError(where + ": sweep 'points' must be an integer >= 2");
  spec.points = sweep["points"].get<std::size_t>();

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    require_keys(s, {"dim_cap", "refine_tol", "boundary_tol", "occupation_floor", "step", "phase_per_step"},
                 where + " solver");
    if (s.contains("dim_cap")) {
      if (!s["dim_cap"].is_number_integer() || s["dim_cap"].get<long>() < 2)
        throw ConfigError(where + ": dim_cap must be an integer >= 2");
      spec.solver.dim_cap = s["dim_cap"].get<std::size_t>();
    }
    if (s.contains("refine_tol")) spec.solver.refine_tol = number_at(s, "refine_tol", where);
    if (s.contains("boundary_tol")) spec.solver.boundary_tol = number_at(s, "boundary_tol", where);
    if (s.contains("occupation_floor")) spec.solver.occupation_floor = number_at(s, "occupation_floor", where);
    if (s.contains("step")) spec.solver.evolve.step = number_at(s, "step", where);
    if (s.contains("phase_per_step")) spec.solver.evolve.phase_per_step = number_at(s, "phase_per_step", where);
  }
  if (j.contains("outputs")) {
    if (!j["outputs"].is_array()) throw ConfigError(where + ": 'outputs' must be an array");
    spec.outputs.clear();
    for (const auto& o : j["outputs"]) {
      if (!o.is_string()) throw ConfigError(where + ": outputs must be strings");
      spec.outputs.push_back(o.get<std::string>());
    }
  }
  spec.validate();
  return spec;
}

}  // namespace detail

/// One SweepSpec per run; run names are "<base>_<run>".
inline std::vector<SweepSpec> parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  if (!doc.contains("runs")) return {detail::parse_single(doc)};
  const auto& runs = doc["runs"];
  if (!runs.is_array() || runs.empty()) throw ConfigError("config: 'runs' must be a non-empty array");
  json base = doc;
  base.erase("runs");
  const std::string base_name = base.value("name", std::string("sweep"));
  std::vector<SweepSpec> out;
  std::set<std::string> names;
  for (const auto& run : runs) {
    if (!run.is_object() || !run.contains("name") || !run["name"].is_string())
      throw ConfigError("config: every run needs a string 'name'");
    json merged = base;
    merged.merge_patch(run);
    merged["name"] = base_name + "_" + run["name"].get<std::string>();
    if (!names.insert(merged["name"].get<std::string>()).second)
      throw ConfigError("config: duplicate run name '" + run["name"].get<std::string>() + "'");
    out.push_back(detail::parse_single(merged));
  }
  return out;
}

inline std::vector<SweepSpec> load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config");
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

/// PB_SIM_PRESETS if set, else the directory baked in at build time.
inline std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("PB_SIM_PRESETS"); env && *env) return env;
  return PBSIM_PRESET_DIR;
}

inline std::vector<std::string> list_presets(const std::filesystem::path& dir = preset_directory()) {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  if (ec) throw ConfigError(dir.string() + ": cannot list presets (" + ec.message() + ")");
  std::sort(names.begin(), names.end());
  return names;
}

inline std::vector<SweepSpec> load_preset(const std::string& name,
                                          const std::filesystem::path& dir = preset_directory()) {
  const auto path = dir / (name + ".json");
  if (!std::filesystem::exists(path)) throw ConfigError("unknown preset '" + name + "' (looked in " + dir.string() + ")");
  return load_config(path.string());
}

}  // namespace pbsim
