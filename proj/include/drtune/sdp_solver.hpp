#pragma once

#include <Eigen/Dense>
#include <vector>

namespace drtune {

/// Small dense semidefinite program in block form with free variables:
///
///   minimize    sum_b <C_b, X_b> + c'u
///   subject to  <A_i, X_{block(i)}> + (F u)_i = b_i,   i = 1..m
///               X_b PSD,  u free.
///
/// Each constraint touches exactly one PSD block. The dual is
///
///   maximize  b'y   s.t.  S_b = C_b - sum_{i in b} y_i A_i PSD,  F'y = c.
struct BlockSdp {
  struct Row {
    int block = 0;
    Eigen::MatrixXd coeff;  // symmetric, block-sized
  };

  std::vector<int> block_sizes;
  std::vector<Eigen::MatrixXd> block_costs;  // empty => all zero
  std::vector<Row> rows;
  Eigen::MatrixXd free_coeffs;  // m x n_free
  Eigen::VectorXd free_cost;    // n_free
  Eigen::VectorXd rhs;          // m
};

enum class SdpStatus { Optimal, MaxIter, NumericalTrouble };

struct SdpOptions {
  double tol = 1e-9;
  int max_iterations = 100;
  double initial_scale = 1.0;      // X_b = S_b = initial_scale * I at start
  Eigen::VectorXd initial_free;    // empty => zeros
};

struct BlockSdpResult {
  SdpStatus status = SdpStatus::NumericalTrouble;
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> S;
  Eigen::VectorXd free;   // u
  Eigen::VectorXd dual;   // y
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double complementarity = 0.0;  // sum <X_b, S_b>
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

/// Infeasible-start primal-dual interior-point method, Nesterov-Todd
/// direction with Mehrotra predictor-corrector.
BlockSdpResult solve_block_sdp(const BlockSdp& problem, const SdpOptions& options = {});

}  // namespace drtune
