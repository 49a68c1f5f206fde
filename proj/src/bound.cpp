#include "drtune/bound.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "drtune/error.hpp"
#include "drtune/lp.hpp"

namespace drtune {

namespace {

double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

Eigen::MatrixXd antidiagonal_indicator(int size, int m) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < size; ++i) {
    const int j = m - i;
    if (j >= 0 && j < size) e(i, j) = 1.0;
  }
  return e;
}

void require_positive_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("threshold alpha must be positive and finite");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Mixes in weight eps of an exponential law with the same mean; the result is
// strictly inside the moment cone whenever M1 > 0.
MomentSequence nudge_interior(const MomentSequence& m, double eps) {
  const double theta = m.mean() > 0.0 ? m.mean() : 1.0;
  std::vector<double> out(m.values());
  double fact_pow = 1.0;
  for (int r = 1; r <= m.order(); ++r) {
    fact_pow *= r * theta;
    out[static_cast<std::size_t>(r)] = (1.0 - eps) * out[static_cast<std::size_t>(r)] + eps * fact_pow;
  }
  return MomentSequence(std::move(out));
}

}  // namespace

double PolyBound::operator()(double q) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * q + *it;
  return acc;
}

double certificate_min_slack(const PolyBound& p, int points) {
  if (points < 2) throw InputError("certificate check needs at least 2 grid points");
  const double a = p.threshold;
  double slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double q_low = a * i / (points - 1);
    slack = std::min(slack, p(q_low));
    const double q_high = a + (99.0 * a) * (i + 1) / points;
    slack = std::min(slack, p(q_high) - 1.0);
  }
  return slack;
}

double markov_bound(const MomentSequence& moments, double alpha) {
  require_positive_alpha(alpha);
  return std::min(1.0, moments.mean() / alpha);
}

double chebyshev_bound(const MomentSequence& moments, double alpha) {
  require_positive_alpha(alpha);
  if (moments.order() < 2) throw InputError("Chebyshev bound needs two moments");
  if (!is_feasible(moments.truncated(2))) throw DomainError("Chebyshev bound: infeasible moments");
  const double m1 = moments.mean();
  if (alpha <= m1) return 1.0;
  const double c2 = std::max(0.0, moments.squared_cv());
  const double delta = alpha / m1 - 1.0;
  const double cantelli = c2 / (c2 + delta * delta);
  return std::min(cantelli, m1 / alpha);
}

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::MaxIter: return "MaxIter";
    case SdpStatus::NumericalTrouble: return "NumericalTrouble";
  }
  return "Unknown";
}

std::string SdpSolution::csv_header(int k) {
  std::string h = "k,alpha,objective,gap,iterations,status";
  for (int r = 0; r <= k; ++r) h += ",y" + std::to_string(r);
  return h;
}

std::string SdpSolution::to_csv_row() const {
  std::string row = std::to_string(static_cast<int>(y.coeffs.size()) - 1) + "," + fmt(y.threshold) + "," +
                    fmt(objective) + "," + fmt(duality_gap) + "," + std::to_string(iterations) + "," +
                    to_string(status);
  for (double c : y.coeffs) row += "," + fmt(c);
  return row;
}

SdpProblem build_sdp(const MomentSequence& moments, double alpha) {
  require_positive_alpha(alpha);
  if (!is_feasible(moments)) throw DomainError("moment-bound SDP: infeasible moment sequence");
  const int k = moments.order();
  SdpProblem prob{k, alpha, moments, {}};

  std::vector<double> alpha_pow(static_cast<std::size_t>(k) + 1, 1.0);
  for (int r = 1; r <= k; ++r) alpha_pow[static_cast<std::size_t>(r)] = alpha_pow[static_cast<std::size_t>(r) - 1] * alpha;

  // X: p(alpha + s) - 1 = sum_l c_l s^l, certified as an SOS in t with s = t^2.
  for (int m = 0; m <= 2 * k; ++m) {
    SdpConstraint row{SdpBlock::X, m, std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0), 0.0};
    if (m % 2 == 0) {
      const int l = m / 2;
      for (int r = l; r <= k; ++r) row.y_coeffs[static_cast<std::size_t>(r)] = binomial(r, l) * alpha_pow[static_cast<std::size_t>(r - l)];
      if (l == 0) row.rhs = -1.0;
    }
    prob.constraints.push_back(std::move(row));
  }
  // Z: (1 + t^2)^k p(alpha t^2 / (1 + t^2)) = sum_l t^{2l} sum_{r<=l} y_r C(k-r, l-r) alpha^r.
  for (int m = 0; m <= 2 * k; ++m) {
    SdpConstraint row{SdpBlock::Z, m, std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0), 0.0};
    if (m % 2 == 0) {
      const int l = m / 2;
      for (int r = 0; r <= l; ++r) row.y_coeffs[static_cast<std::size_t>(r)] = binomial(k - r, l - r) * alpha_pow[static_cast<std::size_t>(r)];
    }
    prob.constraints.push_back(std::move(row));
  }
  return prob;
}

SdpSolution solve_sdp(const SdpProblem& prob, double tol) {
  if (!(tol > 0.0)) throw InputError("SDP tolerance must be positive");
  const int k = prob.k;
  const int n = prob.block_size();
  if (prob.moments.order() != k) throw InputError("SDP problem order does not match its moments");

  BlockSdp sdp;
  sdp.block_sizes = {n, n};
  const int m = static_cast<int>(prob.constraints.size());
  sdp.free_coeffs = Eigen::MatrixXd::Zero(m, k + 1);
  sdp.rhs = Eigen::VectorXd::Zero(m);
  sdp.free_cost = Eigen::Map<const Eigen::VectorXd>(prob.moments.values().data(), k + 1);
  for (int i = 0; i < m; ++i) {
    const SdpConstraint& c = prob.constraints[static_cast<std::size_t>(i)];
    if (static_cast<int>(c.y_coeffs.size()) != k + 1) throw InputError("SDP row has wrong number of y coefficients");
    sdp.rows.push_back({c.block == SdpBlock::X ? 0 : 1, antidiagonal_indicator(n, c.antidiagonal)});
    for (int r = 0; r <= k; ++r) sdp.free_coeffs(i, r) = -c.y_coeffs[static_cast<std::size_t>(r)];
    sdp.rhs(i) = c.rhs;
  }

  SdpOptions opt;
  opt.tol = tol;
  double moment_mass = 0.0;
  for (double v : prob.moments.values()) moment_mass += std::abs(v);
  opt.initial_scale = 1.0 + moment_mass;
  opt.initial_free = Eigen::VectorXd::Zero(k + 1);
  opt.initial_free(0) = 1.0;

  const BlockSdpResult r = solve_block_sdp(sdp, opt);
  SdpSolution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.duality_gap = std::abs(r.primal_objective - r.dual_objective);
  sol.objective = std::clamp(r.primal_objective, 0.0, 1.0);
  sol.y.threshold = prob.alpha;
  sol.y.coeffs.assign(r.free.data(), r.free.data() + r.free.size());
  sol.X = r.X[0];
  sol.Z = r.X[1];
  return sol;
}

SdpSolution worst_case_probability(const MomentSequence& moments, double alpha, double tol) {
  require_positive_alpha(alpha);
  auto solve_normalized = [&](const MomentSequence& m) {
    SdpSolution sol = solve_sdp(build_sdp(m.scaled(1.0 / alpha), 1.0), tol);
    sol.y.threshold = alpha;
    double scale = 1.0;
    for (double& c : sol.y.coeffs) {
      c *= scale;
      scale /= alpha;
    }
    return sol;
  };
  if (!is_feasible(moments)) throw DomainError("worst-case probability: infeasible moment sequence");
  SdpSolution sol = solve_normalized(moments);
  if (sol.status != SdpStatus::Optimal) {
    SdpSolution retry = solve_normalized(nudge_interior(moments, 1e-8));
    if (retry.status == SdpStatus::Optimal || sol.status == SdpStatus::NumericalTrouble) sol = std::move(retry);
  }
  return sol;
}

double oracle_worst_case(const MomentSequence& moments, double alpha, int grid) {
  require_positive_alpha(alpha);
  const int k = moments.order();
  if (k > 4) throw InputError("primal oracle supports k <= 4");
  if (grid < 100) throw InputError("primal oracle needs grid >= 100");

  // Atoms in units of alpha: uniform on [0, 10] plus geometric on [1e-4, 1e3].
  // The geometric tail reaches far past 10 because for odd k the extremal
  // measure parks a vanishing mass arbitrarily far out.
  std::vector<double> atoms{0.0, 1.0};
  const int n_uniform = grid / 2;
  const int n_geometric = grid - n_uniform;
  for (int i = 1; i <= n_uniform; ++i) atoms.push_back(10.0 * i / n_uniform);
  for (int i = 0; i < n_geometric; ++i) atoms.push_back(1e-4 * std::pow(1e7, static_cast<double>(i) / (n_geometric - 1)));
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());

  const auto n = static_cast<Eigen::Index>(atoms.size());
  Eigen::MatrixXd A(k + 1, n);
  Eigen::VectorXd c(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = atoms[static_cast<std::size_t>(j)];
    double p = 1.0;
    for (int r = 0; r <= k; ++r) {
      A(r, j) = p;
      p *= x;
    }
    c(j) = x >= 1.0 ? 1.0 : 0.0;
  }
  const MomentSequence scaled = moments.scaled(1.0 / alpha);
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(scaled.values().data(), k + 1);
  // Column scaling keeps every entry in [0, 1]: far atoms carry x^k up to 1e12.
  // Scaling rows instead would shrink the top moment row below the solver
  // tolerances and let it go unenforced.
  Eigen::VectorXd col_scale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    col_scale(j) = 1.0 / std::max(1.0, A(k, j));
    A.col(j) *= col_scale(j);
    c(j) *= col_scale(j);
  }
  const LpResult lp = maximize_standard_form(c, A, b);
  if (lp.status != LpStatus::Optimal) throw DomainError("primal oracle: no grid distribution matches the moments");
  const double residual = (A * lp.x - b).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * (1.0 + b.cwiseAbs().maxCoeff())) {
    throw NumericalError("primal oracle: LP solution misses the moments by " + std::to_string(residual));
  }
  return std::clamp(lp.objective, 0.0, 1.0);
}

}  // namespace drtune
