#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fluidex/errors.hpp"
#include "src/run_config.hpp"
#include "src/runner.hpp"
#include "src/toml_lite.hpp"

int main(int argc, char** argv) {
  using namespace fluidex::app;

  CLI::App app{"fluidex: short-wave instability experiments on steady Euler flows"};
  std::string command;
  std::optional<std::string> flow, classes, horizons, out, config_path;
  std::optional<int> n, resolution;
  std::optional<std::uint64_t> seed;
  std::optional<double> step, dt;

  app.add_option("command", command, "catalog | exponents | trajectory | verify-lemmas | oracle-compare | verify-flow");
  app.add_option("--flow", flow, "flow name or name:key=val,...");
  app.add_option("--classes", classes, "comma-separated sample classes");
  app.add_option("--horizons", horizons, "comma-separated increasing times");
  app.add_option("--n", n, "samples per class");
  app.add_option("--seed", seed, "sampling seed");
  app.add_option("--step", step, "RK4 step for the bicharacteristic system");
  app.add_option("--resolution", resolution, "grid resolution N (power of two)");
  app.add_option("--dt", dt, "time step of the linearized solver");
  app.add_option("--out", out, "output directory");
  app.add_option("--config", config_path, "TOML config; flags override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  RunConfig cfg;
  try {
    if (config_path) apply_toml(cfg, parse_toml_file(*config_path));
    if (!command.empty()) cfg.command = command;
    if (cfg.command.empty()) throw fluidex::ConfigError("command: missing (see --help)");
    if (flow) cfg.flow = *flow;
    if (classes) cfg.classes = parse_word_list(*classes);
    if (horizons) cfg.horizons = parse_number_list(*horizons, "horizons");
    if (n) cfg.n = *n;
    if (seed) cfg.seed = *seed;
    if (step) cfg.step = *step;
    if (resolution) cfg.resolution = *resolution;
    if (dt) cfg.dt = *dt;
    if (out) cfg.out = *out;
  } catch (const fluidex::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return run_guarded(cfg, std::cout, std::cerr);
}
