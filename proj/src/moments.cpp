#include "drtune/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "drtune/error.hpp"

namespace drtune {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double relative_min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if (m.rows() == 1) return m(0, 0) / scale;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() / scale;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MomentSequence::MomentSequence(std::vector<double> moments, Support support)
    : moments_(std::move(moments)), support_(support) {
  if (moments_.size() < 2) {
    throw InputError("moment sequence needs order >= 1");
  }
  if (moments_[0] != 1.0) {
    throw InputError("moment sequence must have M0 == 1");
  }
  for (double m : moments_) {
    if (!std::isfinite(m)) throw InputError("moment sequence has a non-finite entry");
  }
}

double MomentSequence::variance() const {
  if (order() < 2) throw InputError("variance needs order >= 2");
  return moments_[2] - moments_[1] * moments_[1];
}

double MomentSequence::squared_cv() const {
  if (moments_[1] <= 0.0) throw DomainError("coefficient of variation needs M1 > 0");
  return variance() / (moments_[1] * moments_[1]);
}

MomentSequence MomentSequence::truncated(int k) const {
  if (k < 1 || k > order()) throw InputError("truncation order out of range");
  return MomentSequence({moments_.begin(), moments_.begin() + k + 1}, support_);
}

MomentSequence MomentSequence::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("moment scaling factor must be positive");
  std::vector<double> out(moments_.size());
  double cr = 1.0;
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = moments_[r] * cr;
    cr *= c;
  }
  return MomentSequence(std::move(out), support_);
}

std::string MomentSequence::to_csv_row() const {
  std::string row = std::to_string(order());
  for (double m : moments_) {
    row += ",";
    row += format_double(m);
  }
  return row;
}

MomentSequence MomentSequence::from_csv_row(const std::string& row) {
  std::stringstream ss(row);
  std::string cell;
  std::vector<double> cells;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      cells.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw InputError(cell);
    } catch (const std::exception&) {
      throw InputError("bad moment CSV cell: '" + cell + "'");
    }
  }
  if (cells.size() < 3) throw InputError("moment CSV row too short");
  const double k = cells.front();
  if (k != std::floor(k) || static_cast<std::size_t>(k) + 2 != cells.size()) {
    throw InputError("moment CSV row: order does not match number of moments");
  }
  return MomentSequence({cells.begin() + 1, cells.end()});
}

HankelPair hankel_pair(const MomentSequence& seq) {
  const int k = seq.order();
  // R_k and R_{k-1}: whichever has even index uses M_{i+j}, odd uses M_{i+j+1}.
  const int even_index = (k % 2 == 0) ? k : k - 1;
  const int odd_index = (k % 2 == 1) ? k : k - 1;
  const int ne = even_index / 2 + 1;
  const int no = (odd_index - 1) / 2 + 1;
  HankelPair h{Eigen::MatrixXd(ne, ne), Eigen::MatrixXd(no, no)};
  for (int i = 0; i < ne; ++i)
    for (int j = 0; j < ne; ++j) h.r_even(i, j) = seq[i + j];
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j) h.r_odd(i, j) = seq[i + j + 1];
  return h;
}

HankelSpectrum hankel_spectrum(const MomentSequence& seq) {
  const HankelPair h = hankel_pair(seq);
  return {relative_min_eigenvalue(h.r_even), relative_min_eigenvalue(h.r_odd)};
}

bool is_feasible(const MomentSequence& seq, double tol) {
  if (tol < 0.0) throw InputError("feasibility tolerance must be >= 0");
  const HankelSpectrum s = hankel_spectrum(seq);
  return s.even_min >= -tol && s.odd_min >= -tol;
}

MomentSequence estimate_moments(std::span<const double> samples, int k) {
  if (samples.empty()) throw InputError("cannot estimate moments of an empty sample");
  if (k < 1) throw InputError("moment order must be >= 1");
  std::vector<CompensatedSum> sums(static_cast<std::size_t>(k) + 1);
  for (double x : samples) {
    if (!(x >= 0.0)) throw DomainError("samples of a nonnegative variable must be >= 0");
    double p = 1.0;
    for (int r = 1; r <= k; ++r) {
      p *= x;
      sums[static_cast<std::size_t>(r)].add(p);
    }
  }
  const double n = static_cast<double>(samples.size());
  std::vector<double> m(static_cast<std::size_t>(k) + 1, 1.0);
  for (int r = 1; r <= k; ++r) m[static_cast<std::size_t>(r)] = sums[static_cast<std::size_t>(r)].value() / n;
  return MomentSequence(std::move(m));
}

MomentSequence chi_squared_moments(int dof, int k) {
  if (dof < 1) throw DomainError("chi-squared degrees of freedom must be >= 1");
  if (k < 1) throw InputError("moment order must be >= 1");
  std::vector<double> m(static_cast<std::size_t>(k) + 1, 1.0);
  for (int r = 1; r <= k; ++r) {
    m[static_cast<std::size_t>(r)] = m[static_cast<std::size_t>(r) - 1] * (dof + 2.0 * (r - 1));
  }
  return MomentSequence(std::move(m));
}

}  // namespace drtune
