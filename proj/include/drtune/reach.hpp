#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drtune/lti.hpp"

namespace drtune {

/// {Q^{1/2} u : |u| <= 1}, support function h(l) = sqrt(l' Q l).
struct Ellipsoid {
  Eigen::MatrixXd Q;

  double support(const Eigen::VectorXd& l) const;
  /// Maximizer of l'x over the set; zero when the set is flat along l
  /// (l'Ql <= 1e-14 trace(Q) |l|^2).
  Eigen::VectorXd support_point(const Eigen::VectorXd& l) const;
};

struct BoundarySample {
  double theta = 0.0;  // polar angle of the direction (n = 2 only)
  Eigen::VectorXd direction;
  Eigen::VectorXd point;
  double support = 0.0;
};

struct ReachBound {
  int horizon = 0;
  double w_bar = 0.0;
  double alpha = 0.0;
  std::vector<Ellipsoid> ellipsoids;  // disturbance and attack terms interleaved, i = 0..t-2
  std::vector<BoundarySample> boundary;
  std::optional<double> area;         // n = 2 only
  bool series_converges = false;      // rho(A) < 1 and rho(A + BK) < 1
  double truncation_bound = 0.0;      // support growth still possible beyond the horizon

  double support(const Eigen::VectorXd& l) const;
  bool degenerate() const;
  /// CSV with header "theta,x1,x2". Requires n = 2.
  std::string boundary_csv() const;
};

double noise_threshold(int n, double rate);

/// Minkowski sum of E(w_bar A^i Sw A^i') and E(alpha H_i L Sr L' H_i') with
/// H_i = (A + BK)^i - A^i. Directions are uniform angles for n = 2 and
/// seeded uniform points on the sphere otherwise.
ReachBound reach_bound(const LtiSystem& sys, double w_bar, double alpha, int t, int n_dirs,
                       std::uint64_t direction_seed = 0);

double polygon_area(const std::vector<Eigen::Vector2d>& vertices);
/// True if all cross products of consecutive edges share a sign (zeros allowed).
bool is_convex_polygon(const std::vector<Eigen::Vector2d>& vertices, double tol = 1e-12);

/// Hit-or-miss estimate of the volume of the outer polytope
/// {x : l'x <= h(l) for all sampled l}.
double monte_carlo_volume(const ReachBound& bound, long samples, std::uint64_t seed);

struct OrderingEntry {
  double alpha = 0.0;
  double area = 0.0;
  bool contains_next = true;     // support dominates the next smaller threshold everywhere
  double max_violation = 0.0;    // largest h_next - h_this over directions
};

struct OrderingReport {
  std::vector<OrderingEntry> entries;  // sorted by alpha, largest first
  bool areas_monotone = true;          // non-increasing as alpha decreases
  bool areas_strictly_decreasing = true;  // among distinct thresholds
  bool nested = true;
};

/// Checks reach-set shrinkage across bounds sharing system, w_bar,
/// horizon and directions. Mismatched inputs throw InputError.
OrderingReport volume_comparison(const std::vector<ReachBound>& bounds, double tol = 1e-9);

}  // namespace drtune
