#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drtune/attack.hpp"
#include "drtune/lti.hpp"
#include "drtune/noise.hpp"

namespace drtune {

struct ResidualTrace {
  Eigen::MatrixXd residuals;      // p x T, column t is r_t
  std::vector<double> q_values;   // r_t' Sigma_r^-1 r_t

  long length() const { return static_cast<long>(q_values.size()); }
  /// CSV with header "t,r_1,...,r_p,q".
  std::string to_csv() const;
};

struct SimulationOptions {
  long burn_in = 1000;  // attack-free steps discarded before recording
  double divergence_limit = 1e12;
};

/// Closed loop with u_t = K xhat_t and a steady-state predictor. The attack,
/// if any, starts with the first recorded step. Throws InstabilityError if
/// |x_t| exceeds the divergence limit.
ResidualTrace simulate(const LtiSystem& sys, const NoiseModel& noise_w, const NoiseModel& noise_v, long T,
                       const std::optional<AttackPolicy>& attack = std::nullopt,
                       const SimulationOptions& options = {});

/// Fraction of steps with q_t > alpha.
double empirical_false_alarm_rate(const ResidualTrace& trace, double alpha);
long alarm_count(const ResidualTrace& trace, double alpha);
double binomial_standard_error(double rate, long trials);

}  // namespace drtune
