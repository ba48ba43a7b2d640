#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluidex/bas_dynamics.hpp"
#include "fluidex/errors.hpp"
#include "fluidex/flow_catalog.hpp"
#include "fluidex/fourier_field.hpp"
#include "fluidex/spectral_toolbox.hpp"

namespace fluidex::app {

namespace {

std::vector<double> numbers(const TomlValue& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError("config: '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v.array()) {
    if (!e.is_number()) throw ConfigError("config: '" + field + "' must contain only numbers");
    out.push_back(e.number());
  }
  return out;
}

std::vector<std::string> strings(const TomlValue& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError("config: '" + field + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v.array()) {
    if (!e.is_string()) throw ConfigError("config: '" + field + "' must contain only strings");
    out.push_back(e.string());
  }
  return out;
}

double number(const TomlValue& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError("config: '" + field + "' must be a number");
  return v.number();
}

std::int64_t integer(const TomlValue& v, const std::string& field) {
  try {
    return v.integer();
  } catch (const std::exception&) {
    throw ConfigError("config: '" + field + "' must be an integer");
  }
}

std::string string(const TomlValue& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError("config: '" + field + "' must be a string");
  return v.string();
}

void check_positive_increasing(const std::vector<double>& v, const std::string& field, bool allow_zero) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0 || (!allow_zero && v[i] == 0.0))
      throw ConfigError(field + ": entries must be " + (allow_zero ? "non-negative" : "positive"));
    if (i > 0 && !(v[i] > v[i - 1])) throw ConfigError(field + ": entries must be increasing");
  }
}

}  // namespace

void apply_toml(RunConfig& cfg, const TomlTable& doc) {
  for (const auto& [key, val] : doc) {
    if (key == "command") {
      cfg.command = string(val, key);
    } else if (key == "flow") {
      if (val.is_string()) {
        cfg.flow = val.string();
      } else if (val.is_table()) {
        std::string name;
        std::ostringstream params;
        bool first = true;
        for (const auto& [k, v] : val.table()) {
          if (k == "name") {
            name = string(v, "flow.name");
          } else if (k == "params") {
            if (!v.is_table()) throw ConfigError("config: 'flow.params' must be a table");
            for (const auto& [pk, pv] : v.table()) {
              std::ostringstream num;
              num.precision(17);
              num << number(pv, "flow.params." + pk);
              params << (first ? "" : ",") << pk << "=" << num.str();
              first = false;
            }
          } else {
            throw ConfigError("config: unknown key 'flow." + k + "'");
          }
        }
        if (name.empty()) throw ConfigError("config: 'flow.name' is required");
        cfg.flow = first ? name : name + ":" + params.str();
      } else {
        throw ConfigError("config: 'flow' must be a string or a table");
      }
    } else if (key == "classes") {
      cfg.classes = strings(val, key);
    } else if (key == "horizons") {
      cfg.horizons = numbers(val, key);
    } else if (key == "n") {
      cfg.n = static_cast<int>(std::clamp<std::int64_t>(integer(val, key), -1, 1LL << 30));
    } else if (key == "seed") {
      auto s = integer(val, key);
      if (s < 0) throw ConfigError("seed: must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "step") {
      cfg.step = number(val, key);
    } else if (key == "resolution") {
      cfg.resolution = static_cast<int>(std::clamp<std::int64_t>(integer(val, key), -1, 1 << 20));
    } else if (key == "dt") {
      cfg.dt = number(val, key);
    } else if (key == "out") {
      cfg.out = string(val, key);
    } else if (key == "bound_times") {
      cfg.bound_times = numbers(val, key);
    } else if (key == "trajectory") {
      if (!val.is_table()) throw ConfigError("config: 'trajectory' must be a table");
      for (const auto& [k, v] : val.table()) {
        const std::string f = "trajectory." + k;
        if (k == "x0") cfg.trajectory.x0 = numbers(v, f);
        else if (k == "xi0") cfg.trajectory.xi0 = numbers(v, f);
        else if (k == "b0") cfg.trajectory.b0 = numbers(v, f);
        else if (k == "t_final") cfg.trajectory.t_final = number(v, f);
        else if (k == "every") cfg.trajectory.every = number(v, f);
        else throw ConfigError("config: unknown key '" + f + "'");
      }
    } else if (key == "oracle") {
      if (!val.is_table()) throw ConfigError("config: 'oracle' must be a table");
      for (const auto& [k, v] : val.table()) {
        const std::string f = "oracle." + k;
        if (k == "x0") cfg.oracle.x0 = numbers(v, f);
        else if (k == "xi0") cfg.oracle.xi0 = numbers(v, f);
        else if (k == "zeta") cfg.oracle.zeta = number(v, f);
        else if (k == "deltas") cfg.oracle.deltas = numbers(v, f);
        else if (k == "t_grid") cfg.oracle.t_grid = numbers(v, f);
        else throw ConfigError("config: unknown key '" + f + "'");
      }
    } else if (key == "lemmas") {
      if (!val.is_table()) throw ConfigError("config: 'lemmas' must be a table");
      for (const auto& [k, v] : val.table()) {
        const std::string f = "lemmas." + k;
        if (k == "kinds") cfg.lemmas.kinds = strings(v, f);
        else if (k == "K") cfg.lemmas.K = static_cast<int>(std::clamp<std::int64_t>(integer(v, f), -1, 1 << 20));
        else throw ConfigError("config: unknown key '" + f + "'");
      }
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
}

void RunConfig::validate() const {
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
    throw ConfigError("command: unknown command '" + command + "'");
  SteadyFlow f = parse_flow_spec(flow);
  for (const auto& c : classes) (void)parse_sample_class(c);
  if (horizons.size() < 2) throw ConfigError("horizons: need at least two entries");
  check_positive_increasing(horizons, "horizons", false);
  if (n < 1 || n > 10000000) throw ConfigError("n: must lie in [1, 1e7]");
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("step: must lie in (0, 1]");
  if (resolution && (!is_power_of_two(*resolution) || *resolution < 16 || *resolution > 2048))
    throw ConfigError("resolution: must be a power of two in [16, 2048]");
  if (dt && !(*dt > 0.0 && *dt <= 1.0)) throw ConfigError("dt: must lie in (0, 1]");
  if (out.empty()) throw ConfigError("out: must be a non-empty path");
  for (double t : bound_times)
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("bound_times: entries must be positive");

  const std::size_t d = static_cast<std::size_t>(f.dim());
  if (command == "trajectory") {
    if (trajectory.x0.size() != d || trajectory.xi0.size() != d || trajectory.b0.size() != d)
      throw ConfigError("trajectory: x0, xi0, b0 must have the flow's dimension " + std::to_string(d));
    if (!(trajectory.t_final >= 0.0)) throw ConfigError("trajectory.t_final: must be >= 0");
    if (!(trajectory.every > 0.0)) throw ConfigError("trajectory.every: must be positive");
  }
  if (command == "oracle-compare") {
    if (d != 2) throw ConfigError("oracle-compare: requires a 2D flow");
    if (oracle.x0.size() != 2 || oracle.xi0.size() != 2) throw ConfigError("oracle: x0 and xi0 must be 2-vectors");
    if (!(oracle.zeta > 0.0 && oracle.zeta <= 1.0)) throw ConfigError("oracle.zeta: must lie in (0, 1]");
    if (oracle.deltas.empty()) throw ConfigError("oracle.deltas: must not be empty");
    for (double dl : oracle.deltas)
      if (!(dl > 0.0 && dl <= 1.0)) throw ConfigError("oracle.deltas: entries must lie in (0, 1]");
    if (oracle.t_grid.empty()) throw ConfigError("oracle.t_grid: must not be empty");
    check_positive_increasing(oracle.t_grid, "oracle.t_grid", true);
  }
  if (command == "verify-lemmas") {
    for (const auto& k : lemmas.kinds) (void)parse_lemma_kind(k);
    if (lemmas.K < 1 || lemmas.K > 64) throw ConfigError("lemmas.K: must lie in [1, 64]");
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["flow"] = flow;
  j["classes"] = classes;
  j["horizons"] = horizons;
  j["n"] = n;
  j["seed"] = seed;
  j["step"] = step;
  j["resolution"] = resolution ? nlohmann::json(*resolution) : nlohmann::json(nullptr);
  j["dt"] = dt ? nlohmann::json(*dt) : nlohmann::json(nullptr);
  j["bound_times"] = bound_times;
  j["trajectory"] = {{"x0", trajectory.x0},
                     {"xi0", trajectory.xi0},
                     {"b0", trajectory.b0},
                     {"t_final", trajectory.t_final},
                     {"every", trajectory.every}};
  j["oracle"] = {{"x0", oracle.x0},
                 {"xi0", oracle.xi0},
                 {"zeta", oracle.zeta},
                 {"deltas", oracle.deltas},
                 {"t_grid", oracle.t_grid}};
  j["lemmas"] = {{"kinds", lemmas.kinds}, {"K", lemmas.K}};
  return j;
}

std::vector<double> parse_number_list(const std::string& s, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError(field + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> parse_word_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace fluidex::app
