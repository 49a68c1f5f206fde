#include "drtune/attack.hpp"

#include <cmath>

#include "drtune/error.hpp"

namespace drtune {

Eigen::VectorXd AttackPolicy::delta_bar(long t, int p) const {
  if (p < 1) throw InputError("residual dimension must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("attack threshold must be finite and nonnegative");
  const double radius = std::sqrt(alpha * margin);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
  if (strategy == DirectionStrategy::Rotating && p >= 2) {
    const double angle = rotation_step * static_cast<double>(t);
    out(0) = radius * std::cos(angle);
    out(1) = radius * std::sin(angle);
    return out;
  }
  if (direction.size() == 0) {
    out(0) = radius;
    return out;
  }
  if (direction.size() != p) throw InputError("attack direction has the wrong dimension");
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw InputError("attack direction must be nonzero");
  return direction * (radius / norm);
}

Eigen::VectorXd zero_alarm_attack(const LtiSystem& sys, double alpha, const Eigen::VectorXd& e,
                                  const Eigen::VectorXd& v, const Eigen::VectorXd& delta_bar) {
  if (e.size() != sys.n() || v.size() != sys.p() || delta_bar.size() != sys.p()) {
    throw InputError("attack inputs have inconsistent dimensions");
  }
  if (delta_bar.squaredNorm() > alpha) throw ContractViolation("delta_bar lies outside the no-alarm region");
  return -sys.C() * e - v + sys.sigma_r_sqrt() * delta_bar;
}

}  // namespace drtune
