#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drtune/lti.hpp"
#include "drtune/moments.hpp"
#include "drtune/noise.hpp"
#include "drtune/reach.hpp"
#include "drtune/tuning.hpp"

namespace drtune {

enum class MomentSource { AnalyticChiSquared, Empirical };

struct ExperimentConfig {
  Eigen::MatrixXd A, B, C, K, sigma_w, sigma_v;

  double target_rate = 0.05;
  std::vector<int> orders{1, 2, 4};
  double epsilon = 1e-4;
  MomentSource moment_source = MomentSource::AnalyticChiSquared;
  long empirical_samples = 1000000;

  NoiseFamily family = NoiseFamily::Gaussian;
  std::uint64_t seed = 1;

  long far_steps = 1000000;
  long burn_in = 1000;
  long attack_steps = 10000;

  int horizon = 50;
  int n_dirs = 720;
  std::optional<double> w_bar;  // empty: n / target_rate

  std::string output_dir = "out";

  /// Parses the JSON schema documented in the README. Unknown keys are
  /// rejected so typos do not silently fall back to defaults.
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  LtiSystem system() const;
  NoiseModel process_noise(std::uint64_t stream) const;
  NoiseModel sensor_noise(std::uint64_t stream) const;
};

struct TuneRow {
  ThresholdResult result;
  std::string error;  // empty on success
  bool ok() const { return error.empty(); }
};

struct TuneTable {
  std::optional<MomentSequence> moments;
  std::vector<TuneRow> rows;  // one per order, then the chi-squared reference
  /// `method,k,target_rate,alpha,achieved,epsilon,status`
  std::string to_csv() const;
};

struct FarRow {
  TuningMethod method = TuningMethod::ChiSquared;
  int k = 0;
  double alpha = 0.0;
  double rate = 0.0;
  double std_error = 0.0;
  long steps = 0;
};

struct AttackRow {
  TuningMethod method = TuningMethod::ChiSquared;
  int k = 0;
  double alpha = 0.0;
  long steps = 0;
  long alarms = 0;
  double max_q = 0.0;
};

struct ReachRow {
  TuningMethod method = TuningMethod::ChiSquared;
  int k = 0;
  ReachBound bound;
};

struct ReachTable {
  double w_bar = 0.0;
  std::vector<ReachRow> rows;
  OrderingReport report;
  /// `method,k,alpha,area,contains_next`, largest threshold first.
  std::string areas_csv() const;
};

TuneTable run_tune(const ExperimentConfig& cfg);
std::vector<FarRow> run_far(const ExperimentConfig& cfg, const TuneTable& table);
std::vector<AttackRow> run_attack(const ExperimentConfig& cfg, const TuneTable& table);
/// Throws InstabilityError with the spectral radii if the loop is unstable.
ReachTable run_reach(const ExperimentConfig& cfg, const TuneTable& table);

std::string far_csv(const std::vector<FarRow>& rows);
std::string attack_csv(const std::vector<AttackRow>& rows);
/// File name used for a threshold's boundary export, e.g. reach_9.13152.csv.
std::string reach_file_name(double alpha);

}  // namespace drtune
