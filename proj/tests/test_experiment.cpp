#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "drtune/error.hpp"
#include "drtune/experiment.hpp"

using namespace drtune;
namespace fs = std::filesystem;

namespace {

std::string small_config(const std::string& extra_detector = "", const std::string& system_override = "") {
  const std::string system = system_override.empty() ? R"(
    "A": [[0.84, 0.23], [-0.47, 0.12]],
    "B": [[0.07, -0.32], [0.23, 0.58]],
    "C": [[1, 0], [2, 1]],
    "K": [[1.404, -1.402], [1.842, 1.008]],
    "sigma_w": [[0.0225, -0.0055], [-0.0055, 0.0100]],
    "sigma_v": [[1, 0], [0, 1]])"
                                                      : system_override;
  return R"({
  "system": {)" + system + R"(},
  "detector": {"target_rate": 0.05, "orders": [1, 2, 4], "epsilon": 1e-4)" + extra_detector + R"(},
  "noise": {"family": "gaussian", "seed": 7},
  "simulation": {"steps": 20000, "burn_in": 100, "attack_steps": 500},
  "reach": {"horizon": 20, "n_dirs": 90, "w_bar": "dr"}
})";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesDefaultsAndBlocks) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(small_config());
  EXPECT_EQ(cfg.A.rows(), 2);
  EXPECT_DOUBLE_EQ(cfg.A(1, 0), -0.47);
  EXPECT_EQ(cfg.orders, (std::vector<int>{1, 2, 4}));
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.far_steps, 20000);
  EXPECT_FALSE(cfg.w_bar.has_value());
  EXPECT_EQ(cfg.moment_source, MomentSource::AnalyticChiSquared);
  EXPECT_EQ(cfg.output_dir, "out");

  const ExperimentConfig emp = ExperimentConfig::from_json(small_config(R"(, "moment_source": "empirical:5000")"));
  EXPECT_EQ(emp.moment_source, MomentSource::Empirical);
  EXPECT_EQ(emp.empirical_samples, 5000);
}

TEST(Config, ShippedConfigsLoad) {
  const ExperimentConfig g = ExperimentConfig::from_file(DRTUNE_CONFIG_DIR "/benchmark_gaussian.json");
  EXPECT_EQ(g.family, NoiseFamily::Gaussian);
  const ExperimentConfig l = ExperimentConfig::from_file(DRTUNE_CONFIG_DIR "/benchmark_laplacian.json");
  EXPECT_EQ(l.family, NoiseFamily::MultivariateLaplacian);
  EXPECT_EQ(l.moment_source, MomentSource::Empirical);
  EXPECT_EQ(l.empirical_samples, 1000000);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(ExperimentConfig::from_json("{"), InputError);
  EXPECT_THROW(ExperimentConfig::from_json(small_config(R"(, "typo": 1)")), InputError);
  EXPECT_THROW(ExperimentConfig::from_json(small_config(R"(, "target_rate": 0.6)")), InputError);
  EXPECT_THROW(ExperimentConfig::from_json(small_config(R"(, "epsilon": 0)")), InputError);
  EXPECT_THROW(ExperimentConfig::from_json(small_config(R"(, "orders": [0, 2])")), InputError);
  EXPECT_THROW(ExperimentConfig::from_json(small_config(R"(, "moment_source": "guess")")), InputError);
  EXPECT_THROW(ExperimentConfig::from_json(small_config(R"(, "moment_source": "empirical:12x")")), InputError);
  EXPECT_THROW(ExperimentConfig::from_json(small_config("", R"(
    "A": [[0.5, 0], [0]], "B": [[1]], "C": [[1]], "K": [[1]], "sigma_w": [[1]], "sigma_v": [[1]])")),
               InputError);
  EXPECT_THROW(ExperimentConfig::from_json(small_config("", R"(
    "A": [[0.5]], "B": [[1], [1]], "C": [[1]], "K": [[1]], "sigma_w": [[1]], "sigma_v": [[1]])")),
               InputError);
  EXPECT_THROW(ExperimentConfig::from_file("/nonexistent/config.json"), InputError);
}

TEST(RunTune, ReferenceThresholds) {
  const TuneTable t = run_tune(ExperimentConfig::from_json(small_config()));
  ASSERT_EQ(t.rows.size(), 4u);
  for (const auto& r : t.rows) EXPECT_TRUE(r.ok()) << r.error;
  EXPECT_DOUBLE_EQ(t.rows[0].result.alpha, 40.0);
  EXPECT_NEAR(t.rows[1].result.alpha, 10.7178, 1e-4);
  EXPECT_NEAR(t.rows[2].result.alpha, 9.13, 0.06);
  EXPECT_EQ(t.rows[3].result.method, TuningMethod::ChiSquared);
  EXPECT_NEAR(t.rows[3].result.alpha, 5.99, 0.01);
  const std::string csv = t.to_csv();
  EXPECT_EQ(csv.rfind("method,k,target_rate,alpha,achieved,epsilon,status\nClosedFormK1,1,0.05,40,0.05,0,ok\n", 0), 0u)
      << csv;
}

TEST(RunTune, SingleOrderAndMarkovInversion) {
  const TuneTable t2 = run_tune(ExperimentConfig::from_json(small_config(R"(, "orders": [2])")));
  ASSERT_EQ(t2.rows.size(), 2u);
  EXPECT_NEAR(t2.rows[0].result.alpha, 10.7178, 1e-4);

  std::string half = small_config(R"(, "orders": [1])");
  half.replace(half.find("0.05"), 4, "0.5");
  EXPECT_DOUBLE_EQ(run_tune(ExperimentConfig::from_json(half)).rows[0].result.alpha, 4.0);
}

TEST(RunTune, FailedRowsSerialize) {
  TuneTable t;
  TuneRow row;
  row.result.method = TuningMethod::SdpBisection;
  row.result.k = 6;
  row.result.target_rate = 0.05;
  row.result.epsilon = 1e-4;
  row.error = "solver failed, bracket [1, 2]";
  t.rows.push_back(row);
  EXPECT_EQ(t.to_csv(), "method,k,target_rate,alpha,achieved,epsilon,status\n"
                        "SdpBisection,6,0.05,nan,nan,0.0001,solver failed; bracket [1; 2]\n");
}

TEST(RunFar, ConsumesTunedThresholds) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(small_config());
  const TuneTable t = run_tune(cfg);
  const auto rows = run_far(cfg, t);
  ASSERT_EQ(rows.size(), t.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].alpha, t.rows[i].result.alpha);
    EXPECT_EQ(rows[i].steps, 20000);
  }
  EXPECT_LE(rows[0].rate, rows[1].rate);
  EXPECT_LE(rows[2].rate, rows[3].rate);
  const auto attack = run_attack(cfg, t);
  for (const auto& a : attack) EXPECT_EQ(a.alarms, 0);
}

TEST(RunReach, AreasDecreaseWithThreshold) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(small_config());
  const ReachTable rt = run_reach(cfg, run_tune(cfg));
  EXPECT_DOUBLE_EQ(rt.w_bar, 40.0);
  EXPECT_TRUE(rt.report.areas_strictly_decreasing);
  EXPECT_TRUE(rt.report.nested);
  const std::string csv = rt.areas_csv();
  EXPECT_EQ(csv.rfind("method,k,alpha,area,contains_next\nClosedFormK1,1,40,", 0), 0u) << csv;
  EXPECT_EQ(reach_file_name(9.181849), "reach_9.18185.csv");
}

TEST(RunReach, DegenerateAtOrigin) {
  std::string text = small_config();
  text.replace(text.find("\"dr\""), 4, "0");
  const ExperimentConfig cfg = ExperimentConfig::from_json(text);
  TuneTable t;
  TuneRow row;
  row.result.alpha = 0.0;
  t.rows.push_back(row);
  const ReachTable rt = run_reach(cfg, t);
  ASSERT_EQ(rt.rows.size(), 1u);
  EXPECT_TRUE(rt.rows[0].bound.degenerate());
  EXPECT_EQ(*rt.rows[0].bound.area, 0.0);
}

TEST(RunReach, UnstableLoopAborts) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(small_config("", R"(
    "A": [[1.2, 0], [0, 0.3]], "B": [[1, 0], [0, 1]], "C": [[1, 0], [0, 1]],
    "K": [[0, 0], [0, 0]], "sigma_w": [[1, 0], [0, 1]], "sigma_v": [[1, 0], [0, 1]])"));
  try {
    run_reach(cfg, run_tune(cfg));
    FAIL() << "expected InstabilityError";
  } catch (const InstabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("rho(A) = 1.2"), std::string::npos) << e.what();
  }
}

#ifdef DRTUNE_CLI_PATH
TEST(Cli, DeterministicOutputs) {
  const fs::path dir = fs::temp_directory_path() / "drtune_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "cfg.json") << small_config();
  }
  const std::string base = std::string(DRTUNE_CLI_PATH) + " all --quiet --config " + (dir / "cfg.json").string();
  ASSERT_EQ(std::system((base + " --out " + (dir / "a").string()).c_str()), 0);
  ASSERT_EQ(std::system((base + " --out " + (dir / "b").string()).c_str()), 0);
  ASSERT_EQ(std::system((base + " --seed 99 --out " + (dir / "c").string()).c_str()), 0);
  for (const char* f : {"thresholds.csv", "far.csv", "areas.csv", "attack.csv", "reach_40.csv", "reach_5.99146.csv"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_NE(slurp(dir / "a" / "far.csv"), slurp(dir / "c" / "far.csv"));
  EXPECT_NE(std::system((std::string(DRTUNE_CLI_PATH) + " tune --config /nonexistent.json 2>/dev/null").c_str()), 0);
  fs::remove_all(dir);
}
#endif
