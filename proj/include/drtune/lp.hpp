#pragma once

#include <Eigen/Dense>

namespace drtune {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// maximize c'x  s.t.  A x = b, x >= 0.
/// Dense two-phase tableau simplex, Dantzig pricing with a Bland fallback.
/// Intended for a handful of rows and a few thousand columns.
LpResult maximize_standard_form(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b);

}  // namespace drtune
