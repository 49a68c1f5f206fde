#include "drtune/lp.hpp"

#include <cmath>
#include <vector>

#include "drtune/error.hpp"

namespace drtune {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

struct Tableau {
  // rows 0..m-1 constraints, column `cols` holds the rhs.
  Eigen::MatrixXd t;
  std::vector<int> basis;
  int cols = 0;

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i < t.rows(); ++i) {
      if (i != row && t(i, col) != 0.0) t.row(i) -= t(i, col) * t.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
  }

  // Reduced costs for maximizing `cost` over the columns [0, active).
  // Dantzig pricing, falling back to Bland's rule while pivots are degenerate
  // so that ties cannot cycle. Returns false when unbounded.
  bool run(const Eigen::VectorXd& cost, int active) {
    const int m = static_cast<int>(basis.size());
    int degenerate_run = 0;
    for (int iter = 0; iter < 50 * (active + m); ++iter) {
      Eigen::VectorXd cb(m);
      for (int i = 0; i < m; ++i) cb(i) = cost(basis[static_cast<std::size_t>(i)]);
      const Eigen::VectorXd rc = cost.head(active) - t.leftCols(active).transpose() * cb;
      const bool bland = degenerate_run > 20;
      int enter = -1;
      for (int j = 0; j < active; ++j) {
        if (rc(j) > kCostTol && (enter < 0 || (!bland && rc(j) > rc(enter)))) {
          enter = j;
          if (bland) break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t(i, enter) > kPivotTol) {
          const double ratio = t(i, cols) / t(i, enter);
          if (leave < 0 || ratio < best - 1e-15 ||
              (ratio <= best + 1e-15 && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) return false;
      degenerate_run = best <= 1e-15 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
    throw NumericalError("simplex iteration limit reached");
  }
};

}  // namespace

LpResult maximize_standard_form(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (c.size() != n || b.size() != m) throw InputError("LP dimension mismatch");

  Tableau tab;
  tab.cols = n + m;
  tab.t = Eigen::MatrixXd::Zero(m, n + m + 1);
  tab.basis.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    tab.t.row(i).head(n) = sign * A.row(i);
    tab.t(i, n + i) = 1.0;
    tab.t(i, n + m) = sign * b(i);
    tab.basis[static_cast<std::size_t>(i)] = n + i;
  }

  // Phase I: maximize -sum(artificials).
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setConstant(-1.0);
  tab.run(phase1, n + m);

  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  double infeas = 0.0;
  for (int i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] >= n) infeas += tab.t(i, n + m);
  }
  LpResult result;
  if (infeas > 1e-9 * scale) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  // Drive zero-level artificials out of the basis; drop redundant rows.
  std::vector<int> keep;
  for (int i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] >= n) {
      int col = -1;
      for (int j = 0; j < n; ++j) {
        if (std::abs(tab.t(i, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
        keep.push_back(i);
      }
    } else {
      keep.push_back(i);
    }
  }
  if (static_cast<int>(keep.size()) < m) {
    Tableau reduced;
    reduced.cols = tab.cols;
    reduced.t.resize(static_cast<Eigen::Index>(keep.size()), tab.t.cols());
    for (std::size_t r = 0; r < keep.size(); ++r) {
      reduced.t.row(static_cast<Eigen::Index>(r)) = tab.t.row(keep[r]);
      reduced.basis.push_back(tab.basis[static_cast<std::size_t>(keep[r])]);
    }
    tab = std::move(reduced);
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = c;
  if (!tab.run(phase2, n)) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  result.status = LpStatus::Optimal;
  result.x = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < tab.basis.size(); ++i) {
    if (tab.basis[i] < n) result.x(tab.basis[i]) = std::max(0.0, tab.t(static_cast<Eigen::Index>(i), n + m));
  }
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace drtune
