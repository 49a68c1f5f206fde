#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace drtune {

enum class Support { NonnegativeReals };

/// Truncated raw-moment vector (M^0, ..., M^k) of a scalar nonnegative
/// random variable. M^0 is always 1.
class MomentSequence {
 public:
  /// Throws InputError unless moments[0] == 1, size >= 2 and all finite.
  explicit MomentSequence(std::vector<double> moments,
                          Support support = Support::NonnegativeReals);

  int order() const { return static_cast<int>(moments_.size()) - 1; }
  double operator[](int r) const { return moments_[static_cast<std::size_t>(r)]; }
  const std::vector<double>& values() const { return moments_; }
  Support support() const { return support_; }

  double mean() const { return moments_[1]; }
  /// M^2 - (M^1)^2; requires order >= 2.
  double variance() const;
  /// Squared coefficient of variation (M^2 - (M^1)^2) / (M^1)^2.
  double squared_cv() const;

  /// First `k` moments of this sequence (k <= order()).
  MomentSequence truncated(int k) const;
  /// Moments of c*X, i.e. M^r c^r.
  MomentSequence scaled(double c) const;

  /// `k, M0, M1, ..., Mk`
  std::string to_csv_row() const;
  static MomentSequence from_csv_row(const std::string& row);

  bool operator==(const MomentSequence&) const = default;

 private:
  std::vector<double> moments_;
  Support support_;
};

/// Hankel matrices of a moment sequence: r_even(i,j) = M_{i+j},
/// r_odd(i,j) = M_{i+j+1}. For order k these are R_k and R_{k-1}.
struct HankelPair {
  Eigen::MatrixXd r_even;
  Eigen::MatrixXd r_odd;
};

HankelPair hankel_pair(const MomentSequence& seq);

/// Smallest eigenvalue of each Hankel matrix, divided by that matrix's
/// largest absolute entry.
struct HankelSpectrum {
  double even_min;
  double odd_min;
};
HankelSpectrum hankel_spectrum(const MomentSequence& seq);

/// True iff both Hankel matrices are PSD within `tol` (relative to the
/// matrix's largest absolute entry). Boundary (rank-deficient) sequences pass.
bool is_feasible(const MomentSequence& seq, double tol = 1e-9);

/// Empirical raw moments (1/N) sum x_i^r, r = 0..k, with compensated sums.
MomentSequence estimate_moments(std::span<const double> samples, int k);

/// Raw moments of chi-squared(p): M^r = prod_{j<r} (p + 2j).
MomentSequence chi_squared_moments(int dof, int k);

}  // namespace drtune
