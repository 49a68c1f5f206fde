#pragma once

#include <Eigen/Dense>

#include "drtune/lti.hpp"

namespace drtune {

enum class AttackMode { ZeroAlarm };
enum class DirectionStrategy { Fixed, Rotating };

/// Sensor injection that keeps q_t = |delta_bar_t|^2 <= alpha at every step.
struct AttackPolicy {
  double alpha = 0.0;
  AttackMode mode = AttackMode::ZeroAlarm;
  DirectionStrategy strategy = DirectionStrategy::Fixed;
  Eigen::VectorXd direction;       // fixed-mode direction; empty means e_1
  double margin = 1.0 - 1e-9;      // |delta_bar|^2 = margin * alpha, keeps rounding below the threshold
  double rotation_step = 0.1;      // radians per step in the (e_1, e_2) plane

  /// delta_bar at step t for a p-dimensional residual.
  Eigen::VectorXd delta_bar(long t, int p) const;
};

/// delta_t = -C e_t - v_t + Sigma_r^{1/2} delta_bar. Throws ContractViolation
/// when |delta_bar|^2 > alpha.
Eigen::VectorXd zero_alarm_attack(const LtiSystem& sys, double alpha, const Eigen::VectorXd& e,
                                  const Eigen::VectorXd& v, const Eigen::VectorXd& delta_bar);

}  // namespace drtune
