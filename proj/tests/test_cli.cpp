#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace topoloc::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "topoloc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("topoloc_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class EnvGuard {
 public:
  explicit EnvGuard(const char* value) {
    if (value) {
      setenv("TOPOLOC_WORKERS", value, 1);
    } else {
      unsetenv("TOPOLOC_WORKERS");
    }
  }
  ~EnvGuard() { unsetenv("TOPOLOC_WORKERS"); }
};

TEST(Config, DefaultsAndHashStability) {
  const ExperimentConfig a = parse_config("");
  const ExperimentConfig b = parse_config("[grid]\nstep = 0.02\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_NE(a.hash(), parse_config("[grid]\nstep = 0.05\n").hash());
  EXPECT_EQ(a.g_grid().size(), 101u);
}

TEST(Config, Overrides) {
  const ExperimentConfig c = parse_config("", {"grid.step=0.5", "loop.spec=\"Lz_h\""});
  EXPECT_EQ(c.g_grid().size(), 5u);
  EXPECT_EQ(c.loop.to_string(), "Lz_h");
  EXPECT_THROW(parse_config("", {"grid.step"}), ConfigError);
}

TEST(Config, SchemaErrors) {
  EXPECT_THROW(parse_config("[nonsense]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[grid]\nstpe = 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config("[grid]\nstep = \"fast\"\n"), ConfigError);
  EXPECT_THROW(parse_config("[grid\n"), ConfigError);
  EXPECT_THROW(parse_config("[loop]\nspec = \"Lq_h\"\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/topoloc.toml"), ConfigError);
}

TEST(Config, WorkersFromEnvironment) {
  ExperimentConfig c;
  {
    EnvGuard env("3");
    apply_environment(c);
    EXPECT_EQ(c.run.workers, 3u);
  }
  {
    EnvGuard env("three");
    EXPECT_THROW(apply_environment(c), ConfigError);
  }
  {
    EnvGuard env(nullptr);
    c.run.workers = 5;
    apply_environment(c);
    EXPECT_EQ(c.run.workers, 5u);
  }
}

TEST(Cli, ConfigErrorsExitTwo) {
  const fs::path dir = scratch("errors");
  std::ofstream(dir / "bad.toml") << "[grid]\nstep = -1\n";
  EXPECT_EQ(invoke({"sweep", "-c", (dir / "bad.toml").string(), "-o", dir.string()}).code, 2);
  EXPECT_EQ(invoke({"sweep", "-c", (dir / "missing.toml").string()}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--loop", "Lq_h", "-o", dir.string()}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  {
    EnvGuard env("-2");
    EXPECT_EQ(invoke({"sweep", "-o", dir.string()}).code, 2);
  }
}

TEST(Cli, VersionFlag) {
  const Result r = invoke({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, tool_version() + "\n");
}

TEST(Cli, DefaultSweepWritesTableAndMetadata) {
  const fs::path dir = scratch("sweep");
  const Result r = invoke({"sweep", "-o", dir.string(), "-j", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = lines_of(slurp(dir / "sweep.csv"));
  const ExperimentConfig cfg = parse_config("", {"output.dir=\"" + dir.string() + "\""});
  ASSERT_EQ(csv.size(), 2u + 101u);
  EXPECT_NE(csv[0].find("config_hash=" + cfg.hash()), std::string::npos);
  EXPECT_NE(csv[0].find(tool_version()), std::string::npos);
  EXPECT_EQ(csv[2].rfind(cfg.hash(), 0), 0u);
  const auto j = nlohmann::json::parse(slurp(dir / "sweep.json"));
  EXPECT_EQ(j["config_hash"], cfg.hash());
  EXPECT_EQ(j["version"], tool_version());
}

TEST(Cli, SweepIsDeterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::vector<std::string> common = {"--set", "grid.step=0.1", "--set", "bounds.rle=true", "-j", "1"};
  auto args = [&](const fs::path& dir) {
    std::vector<std::string> v{"sweep", "-o", dir.string()};
    v.insert(v.end(), common.begin(), common.end());
    return v;
  };
  ASSERT_EQ(invoke(args(a)).code, 0);
  ASSERT_EQ(invoke(args(b)).code, 0);
  // The output dir is part of the config, so compare everything after the hash column.
  auto strip = [](const std::string& text) {
    std::string out;
    for (const auto& line : lines_of(text)) {
      if (line.empty() || line[0] == '#') continue;
      out += line.substr(line.find(',')) + "\n";
    }
    return out;
  };
  EXPECT_EQ(strip(slurp(a / "sweep.csv")), strip(slurp(b / "sweep.csv")));
}

TEST(Cli, SyntheticScalingRecoversExponent) {
  const fs::path dir = scratch("scaling");
  const Result r = invoke({"scaling", "-o", dir.string(), "--set", "scaling.synthetic=true"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir / "scaling.json"));
  EXPECT_NEAR(j["fit"]["nu"].get<double>(), 0.588, 1e-9);
  EXPECT_NEAR(j["fit"]["alpha"].get<double>(), 0.386, 1e-9);
  EXPECT_TRUE(j["monotone_approach"].get<bool>());
}

TEST(Cli, ScalingNeedsThreeSizes) {
  const fs::path dir = scratch("scaling_two");
  const Result r =
      invoke({"scaling", "-o", dir.string(), "--set", "scaling.synthetic=true", "--set", "scaling.sizes=[8, 12]"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, ShortDynamicsRun) {
  const fs::path dir = scratch("dynamics");
  const Result r = invoke({"dynamics", "-o", dir.string(), "--set", "time.t_end=2.0", "--set", "dynamics.g=[0.1]",
                           "--set", "bath.s=[1.0]"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = lines_of(slurp(dir / "dynamics_trajectory.csv"));
  EXPECT_EQ(csv.size(), 2u + 21u);
  const auto j = nlohmann::json::parse(slurp(dir / "dynamics.json"));
  EXPECT_EQ(j["runs"].size(), 1u);
}

TEST(Cli, InjectedFaultExitsOne) {
  const Result r = invoke({"validate", "--inject-fault"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("condition (b)"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace topoloc::cli
