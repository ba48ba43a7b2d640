#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fluidex/errors.hpp"
#include "fluidex/flow_catalog.hpp"
#include "run_config.hpp"
#include "runner.hpp"
#include "toml_lite.hpp"

using namespace fluidex;
using namespace fluidex::app;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fluidex-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST(Toml, ParsesSubset) {
  auto doc = parse_toml(R"(
# comment
command = "exponents"
horizons = [5, 10,
            20.5]   # trailing
[flow]
name = 'cellular'
params.amp = 2
)");
  EXPECT_EQ(doc.at("command").string(), "exponents");
  EXPECT_EQ(doc.at("horizons").array().size(), 3u);
  EXPECT_DOUBLE_EQ(doc.at("horizons").array()[2].number(), 20.5);
  EXPECT_EQ(doc.at("flow").table().at("params").table().at("amp").integer(), 2);
}

TEST(Toml, RejectsMalformedInput) {
  EXPECT_THROW(parse_toml("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(parse_toml("a = \n"), ConfigError);
  EXPECT_THROW(parse_toml("a = [1, 2\n"), ConfigError);
  EXPECT_THROW(parse_toml("a = nan\n"), ConfigError);
}

TEST(RunConfigTest, TomlMapping) {
  RunConfig cfg;
  apply_toml(cfg, parse_toml(R"(
command = "trajectory"
n = 7
seed = 3
[flow]
name = "cellular"
params.amp = 2.0
[trajectory]
t_final = 2.5
)"));
  EXPECT_EQ(cfg.command, "trajectory");
  EXPECT_EQ(cfg.flow, "cellular:amp=2");
  EXPECT_EQ(cfg.n, 7);
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_DOUBLE_EQ(cfg.trajectory.t_final, 2.5);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(RunConfigTest, UnknownKeysRejected) {
  RunConfig cfg;
  EXPECT_THROW(apply_toml(cfg, parse_toml("bogus = 1\n")), ConfigError);
  EXPECT_THROW(apply_toml(cfg, parse_toml("[oracle]\nsize = 1\n")), ConfigError);
}

TEST(RunConfigTest, ValidationNamesTheField) {
  RunConfig cfg;
  cfg.command = "exponents";
  cfg.horizons = {10, 5};
  try {
    cfg.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("horizons"), std::string::npos);
  }
  cfg.horizons = {5, 10};
  cfg.resolution = 100;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.resolution.reset();
  cfg.command = "launch";
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(RunConfigTest, ListParsing) {
  EXPECT_EQ(parse_number_list("5,10,20", "h"), (std::vector<double>{5, 10, 20}));
  EXPECT_THROW(parse_number_list("5,x", "h"), ConfigError);
  EXPECT_EQ(parse_word_list("full,star2"), (std::vector<std::string>{"full", "star2"}));
}

TEST(Runner, CatalogListsEveryFlow) {
  RunConfig cfg;
  cfg.command = "catalog";
  cfg.out = fresh_dir("catalog").string();
  std::ostringstream out, err;
  ASSERT_EQ(run_guarded(cfg, out, err), kExitOk) << err.str();
  auto j = nlohmann::json::parse(slurp(fs::path(cfg.out) / "catalog.json"));
  EXPECT_EQ(j["flows"].size(), catalog().size());
  EXPECT_NE(out.str().find("bump-shear"), std::string::npos);
}

TEST(Runner, F3OnWholeSupportIsValidationError) {
  RunConfig cfg;
  cfg.command = "exponents";
  cfg.flow = "abc";
  cfg.classes = {"f3"};
  cfg.out = fresh_dir("f3").string();
  std::ostringstream out, err;
  EXPECT_EQ(run_guarded(cfg, out, err), kExitValidation);
  EXPECT_NE(err.str().find("supp(omega) is the whole domain; f3 undefined"), std::string::npos);
  EXPECT_FALSE(fs::exists(fs::path(cfg.out) / "manifest.json"));
}

TEST(Runner, ManifestCoversOutputsAndRerunsAreIdentical) {
  RunConfig cfg;
  cfg.command = "exponents";
  cfg.flow = "cellular";
  cfg.classes = {"full", "star2"};
  cfg.horizons = {2, 4, 6};
  cfg.n = 30;
  std::string first;
  for (int rep = 0; rep < 2; ++rep) {
    cfg.out = fresh_dir("manifest" + std::to_string(rep)).string();
    std::ostringstream out, err;
    ASSERT_EQ(run_guarded(cfg, out, err), kExitOk) << err.str();
    auto m = nlohmann::json::parse(slurp(fs::path(cfg.out) / "manifest.json"));
    std::set<std::string> listed;
    for (const auto& o : m["outputs"]) {
      listed.insert(o["name"].get<std::string>());
      EXPECT_EQ(sha256_hex(slurp(fs::path(cfg.out) / o["name"].get<std::string>())), o["sha256"]);
    }
    for (const auto& e : fs::directory_iterator(cfg.out)) {
      const std::string name = e.path().filename().string();
      if (name != "manifest.json") EXPECT_TRUE(listed.count(name)) << "orphan " << name;
    }
    const std::string report = slurp(fs::path(cfg.out) / "exponents.json");
    if (rep == 0) first = report;
    else EXPECT_EQ(report, first);
  }
}

TEST(Runner, TrajectoryWritesCsv) {
  RunConfig cfg;
  cfg.command = "trajectory";
  cfg.flow = "cellular";
  cfg.trajectory.t_final = 1.0;
  cfg.trajectory.every = 0.5;
  cfg.out = fresh_dir("trajectory").string();
  std::ostringstream out, err;
  ASSERT_EQ(run_guarded(cfg, out, err), kExitOk) << err.str();
  auto j = nlohmann::json::parse(slurp(fs::path(cfg.out) / "trajectory.json"));
  EXPECT_NEAR(j["log_b_final"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(j["points"], 3);
}

TEST(Runner, VerifyFlowReportsResiduals) {
  RunConfig cfg;
  cfg.command = "verify-flow";
  cfg.flow = "abc";
  cfg.resolution = 32;
  cfg.out = fresh_dir("verify").string();
  std::ostringstream out, err;
  ASSERT_EQ(run_guarded(cfg, out, err), kExitOk) << err.str();
  auto j = nlohmann::json::parse(slurp(fs::path(cfg.out) / "verify_flow.json"));
  EXPECT_LE(j["euler_residual"].get<double>(), 1e-10);
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
