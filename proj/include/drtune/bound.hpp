#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "drtune/moments.hpp"
#include "drtune/sdp_solver.hpp"

namespace drtune {

/// Dual polynomial p(q) = sum_r coeffs[r] q^r for the alarm set (threshold, inf):
/// p >= 1 above the threshold and p >= 0 on [0, threshold].
struct PolyBound {
  std::vector<double> coeffs;
  double threshold = 0.0;

  double operator()(double q) const;
};

/// Smallest slack of the two certificate conditions over a grid of `points`
/// samples each: min of p(q) on [0, alpha] and p(q) - 1 on (alpha, 100 alpha].
double certificate_min_slack(const PolyBound& p, int points = 10000);

/// sup P(q > alpha) given only the mean: min(1, M1 / alpha).
double markov_bound(const MomentSequence& moments, double alpha);

/// Tight one-sided bound from the first two moments on the nonnegative reals.
/// Equals C^2 / (C^2 + delta^2) with alpha = (1 + delta) M1 when C^2 <= delta,
/// and the Markov bound otherwise; 1 for alpha <= M1.
double chebyshev_bound(const MomentSequence& moments, double alpha);

enum class SdpBlock { X, Z };

/// One equality row: sum_{i+j=antidiagonal} P_ij - sum_r y_coeffs[r] y_r = rhs,
/// where P is the block named by `block`.
struct SdpConstraint {
  SdpBlock block = SdpBlock::X;
  int antidiagonal = 0;
  std::vector<double> y_coeffs;
  double rhs = 0.0;
};

/// Moment-bound SDP: minimize sum_r y_r M^r over polynomials that are
/// sum-of-squares certified >= 1 on [alpha, inf) (block X) and >= 0 on
/// [0, alpha] (block Z), both blocks (k+1) x (k+1).
struct SdpProblem {
  int k = 0;
  double alpha = 0.0;
  MomentSequence moments;
  std::vector<SdpConstraint> constraints;

  int block_size() const { return k + 1; }
};

struct SdpSolution {
  double objective = 1.0;  // worst-case probability, clamped to [0, 1]
  PolyBound y;
  double duality_gap = 0.0;
  int iterations = 0;
  SdpStatus status = SdpStatus::NumericalTrouble;
  Eigen::MatrixXd X;
  Eigen::MatrixXd Z;

  /// `k,alpha,objective,gap,iterations,status,y0,...,yk`
  std::string to_csv_row() const;
  static std::string csv_header(int k);
};

std::string to_string(SdpStatus status);

/// Emits the constraint rows for threshold `alpha`. Throws DomainError for
/// alpha <= 0 or moments that fail is_feasible.
SdpProblem build_sdp(const MomentSequence& moments, double alpha);

/// Solves the problem exactly as built (no rescaling).
SdpSolution solve_sdp(const SdpProblem& problem, double tol = 1e-9);

/// Worst-case P(q >= alpha) over all distributions on [0, inf) matching the
/// moments. Solves the problem in units of alpha (q / alpha, threshold 1) and
/// maps the certificate back; boundary moment vectors that trip the solver
/// are retried after mixing in 1e-8 of an exponential law.
SdpSolution worst_case_probability(const MomentSequence& moments, double alpha,
                                   double tol = 1e-9);

/// Independent primal lower bound: maximizes P(q >= alpha) over discrete
/// distributions on a fixed grid of `grid` atoms in [0, 10 alpha] (0 and alpha
/// always included) matching the moments, by linear programming.
double oracle_worst_case(const MomentSequence& moments, double alpha, int grid);

}  // namespace drtune
