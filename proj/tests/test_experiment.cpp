// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mmwcov/experiment.hpp"

using namespace mmwcov;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mmwcov_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig quick(const std::string& scenario, const fs::path& out) {
  ExperimentConfig c;
  c.scenario = scenario;
  c.trials = 1500;
  c.engines = {Engine::kMonteCarlo};
  c.out_dir = out.string();
  c.seed = 8;
  return c;
}

struct CsvRow {
  double x, value, se;
  std::string engine, policy;
};

std::vector<CsvRow> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,value,stderr,engine,policy");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f[5];
    for (auto& s : f) std::getline(ss, s, ',');
    rows.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2]), f[3], f[4]});
  }
  return rows;
}

}  // namespace

TEST(Config, EmptyTextIsDefaults) {
  const auto r = parse_config_text("\n# only a comment\n   \n");
  EXPECT_EQ(r.config, ExperimentConfig{});
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Config, ValuesAndLeafNames) {
  const auto r = parse_config_text(
      "network.alpha_L = 2.2\n"
      "lambda_bs = 0.0016   # leaf name\n"
      "antenna.m = 3\n"
      "antenna.phi_3dB = auto\n"
      "grid.gamma_dB = -3, 0, 3\n"
      "grid.policies = P3\n"
      "engines = analytic\n"
      "analytic.p1_exclusion = printed\n",
      true);
  const auto& c = r.config;
  EXPECT_EQ(c.alpha, 2.2);
  EXPECT_EQ(c.lambda_bs, 0.0016);
  EXPECT_EQ(c.sector_exp, 3);
  EXPECT_FALSE(c.phi_3db.has_value());
  EXPECT_EQ(c.gamma_db, (std::vector<double>{-3.0, 0.0, 3.0}));
  EXPECT_EQ(c.policies, std::vector<Policy>{Policy::kNearest});
  EXPECT_EQ(c.engines, std::vector<Engine>{Engine::kAnalytic});
  EXPECT_EQ(c.p1_exclusion, ExclusionMode::kPrinted);
  const auto net = c.network_params();
  EXPECT_NEAR(net.channel.p_tx, dbm_to_watts(45.0), 0.0);
  EXPECT_EQ(net.antenna.beam_count(), 8);
}

TEST(Config, BadValueNamesKeyAndLine) {
  try {
    parse_config_text("seed = 3\nnetwork.alpha_L = -1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.key(), "network.alpha_L");
    const std::string what = e.what();
    EXPECT_NE(what.find("line 2"), std::string::npos);
    EXPECT_NE(what.find("network.alpha_L"), std::string::npos);
  }
  EXPECT_THROW(parse_config_text("trials = many\n"), ConfigError);
  EXPECT_THROW(parse_config_text("just words\n"), ConfigError);
  EXPECT_THROW(parse_config_text("grid.policies = P4\n"), ConfigError);
}

TEST(Config, UnknownKeySuggestsNearest) {
  try {
    parse_config_text("alpha = 2\n", true);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha_L"), std::string::npos);
  }
  const auto r = parse_config_text("network.lamda_bs = 1\n", false);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("network.lambda_bs"), std::string::npos);
  EXPECT_EQ(r.config.lambda_bs, ExperimentConfig{}.lambda_bs);
}

TEST(Config, EnvironmentOverrides) {
  const std::map<std::string, std::string> env{{"MMWCOV_NETWORK_ALPHA_L", "2.4"}, {"MMWCOV_SEED", "99"}};
  ExperimentConfig c;
  apply_env_overrides(c, [&](const char* n) -> const char* {
    const auto it = env.find(n);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(c.alpha, 2.4);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_THROW(apply_env_overrides(c, [](const char* n) -> const char* {
                 return std::string(n) == "MMWCOV_TRIALS" ? "0" : nullptr;
               }),
               ConfigError);
}

TEST(Config, TextRoundTripIsFixedPoint) {
  auto c = parse_config_text("lambda_bs = 0.0004\nphi_3dB = 0.7\nsector_sweep = 2,3\nlevels_dB = -60,-50\n").config;
  const auto back = parse_config_text(config_to_text(c), true).config;
  EXPECT_EQ(back, c);
  EXPECT_EQ(config_to_text(back), config_to_text(c));
}

TEST(Config, CrossFieldChecks) {
  ExperimentConfig c;
  c.scenario = "fig9";
  EXPECT_THROW(check_config(c), ConfigError);
  c = {};
  c.engines.clear();
  EXPECT_THROW(check_config(c), ConfigError);
  c = {};
  c.sla_db = -3.0;
  EXPECT_THROW(check_config(c), ConfigError);
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(validate_config("/nonexistent/mmwcov.cfg", false, nullptr, false), ConfigError);
}

TEST(Csv, SchemaAndFormatting) {
  Series s{Engine::kMonteCarlo, "P2/m=3", "P2/m=3", {"mc", "P2", {{-5.0, 0.75, 0.01, 100}, {0.0, 0.5, 0.02, 100}}}, 0};
  std::ostringstream out;
  write_csv(out, {s});
  EXPECT_EQ(out.str(),
            "x,value,stderr,engine,policy\n"
            "-5.0000000000e+00,7.5000000000e-01,1.0000000000e-02,mc,P2/m=3\n"
            "0.0000000000e+00,5.0000000000e-01,2.0000000000e-02,mc,P2/m=3\n");
}

TEST(Runner, Fig5WritesMatchingGrids) {
  const auto dir = scratch("fig5");
  auto cfg = quick("fig5", dir);
  cfg.engines = {Engine::kMonteCarlo, Engine::kAnalytic};
  cfg.gamma_db = {0.0, 10.0};
  const auto res = run_experiment(cfg);
  const auto mc = read_csv(dir / "fig5_mc.csv");
  const auto an = read_csv(dir / "fig5_analytic.csv");
  ASSERT_EQ(mc.size(), 12u);  // 2 policies × 3 sector exponents × 2 thresholds
  ASSERT_EQ(an.size(), mc.size());
  std::set<std::string> labels;
  for (std::size_t i = 0; i < mc.size(); ++i) {
    EXPECT_EQ(mc[i].x, an[i].x);
    EXPECT_EQ(mc[i].policy, an[i].policy);
    EXPECT_EQ(an[i].se, 0.0);
    labels.insert(mc[i].policy);
  }
  EXPECT_EQ(labels.size(), 6u);
  EXPECT_TRUE(labels.count("P1/m=2"));
  EXPECT_TRUE(fs::exists(dir / "fig5_manifest.json"));
  EXPECT_EQ(res.manifest["scenario"], "fig5");
  EXPECT_EQ(res.manifest["tolerance_flags"].size(), 6u);
}

TEST(Runner, ManifestReplayReproducesCsv) {
  const auto dir = scratch("replay_a");
  auto cfg = quick("fig6", dir);
  cfg.gamma_db = {-5.0, 5.0};
  run_experiment(cfg);
  auto again = validate_config(dir / "fig6_manifest.json", true, nullptr, false);
  EXPECT_EQ(again, cfg);
  const auto dir2 = scratch("replay_b");
  again.out_dir = dir2.string();
  again.workers = 3;
  run_experiment(again);
  EXPECT_EQ(slurp(dir / "fig6_mc.csv"), slurp(dir2 / "fig6_mc.csv"));
}

TEST(Runner, Fig7GridPerPolicy) {
  const auto dir = scratch("fig7");
  auto cfg = quick("fig7", dir);
  cfg.trials = 400;
  run_experiment(cfg);
  for (const char* p : {"P1", "P3"}) {
    const auto rows = read_csv(dir / (std::string("fig7_mc_") + p + ".csv"));
    ASSERT_EQ(rows.size(), 15u) << p;
    for (const auto& r : rows) {
      EXPECT_GE(r.x, 2.0);
      EXPECT_LE(r.x, 6.0);
      EXPECT_NE(r.policy.find("lambda="), std::string::npos);
    }
  }
}

TEST(Runner, DominantSeriesInCustom) {
  const auto dir = scratch("custom");
  auto cfg = quick("custom", dir);
  cfg.engines = {Engine::kMonteCarlo, Engine::kDominant};
  cfg.policies = {Policy::kNearest};
  cfg.gamma_db = {0.0};
  ExperimentRunner runner(cfg);
  const auto series = runner.compute();
  bool dominant = false, mc_dominant = false;
  for (const auto& s : series) {
    dominant |= s.engine == Engine::kDominant;
    mc_dominant |= s.engine == Engine::kMonteCarlo && s.label.find("dominant") != std::string::npos;
  }
  EXPECT_TRUE(dominant);
  EXPECT_TRUE(mc_dominant);
}

TEST(Runner, UnwritableOutputIsConfigError) {
  const auto blocker = scratch("blocker");
  std::ofstream(blocker.string()) << "x";
  auto cfg = quick("fig5", blocker / "sub");
  cfg.trials = 50;
  cfg.gamma_db = {0.0};
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  fs::remove(blocker);
}
