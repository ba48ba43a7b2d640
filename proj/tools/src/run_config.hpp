#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toml_lite.hpp"
#include <nlohmann/json.hpp>

namespace fluidex::app {

struct TrajectoryConfig {
  std::vector<double> x0{0.0, 0.0};
  std::vector<double> xi0{1.0, 0.0};
  std::vector<double> b0{0.0, 1.0};
  double t_final = 10.0;
  double every = 0.1;
};

struct OracleConfig {
  std::vector<double> x0{0.0, 1.0};
  std::vector<double> xi0{1.0, 0.0};
  double zeta = 0.9;
  std::vector<double> deltas{1.0 / 16, 1.0 / 64};
  std::vector<double> t_grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
};

struct LemmaConfig {
  std::vector<std::string> kinds{"solproj", "inimage3d", "image2d", "kernel2d"};
  int K = 24;
};

struct RunConfig {
  std::string command;
  std::string flow = "cellular";
  std::vector<std::string> classes;  // empty: every class the flow supports
  std::vector<double> horizons{5.0, 10.0, 20.0, 30.0};
  int n = 500;
  std::uint64_t seed = 1;
  double step = 1e-3;
  std::optional<int> resolution;
  std::optional<double> dt;
  std::string out = "fluidex-out";
  std::vector<double> bound_times{1.0};
  TrajectoryConfig trajectory;
  OracleConfig oracle;
  LemmaConfig lemmas;

  // Throws ConfigError naming the offending field.
  void validate() const;
  // Canonical form hashed into the manifest.
  nlohmann::json to_json() const;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"catalog",       "exponents",      "trajectory",
                                              "verify-lemmas", "oracle-compare", "verify-flow"};
  return names;
}

// Applies a parsed TOML document; unknown keys raise ConfigError.
void apply_toml(RunConfig& cfg, const TomlTable& doc);

std::vector<double> parse_number_list(const std::string& s, const std::string& field);
std::vector<std::string> parse_word_list(const std::string& s);

}  // namespace fluidex::app
