#pragma once

#include <optional>
#include <string>

#include "drtune/error.hpp"
#include "drtune/moments.hpp"

namespace drtune {

/// The SDP bound could not be evaluated mid-bisection; carries the bracket
/// that was still valid when it happened.
class BisectionError : public NumericalError {
 public:
  BisectionError(const std::string& what, double lower, double upper)
      : NumericalError(what), lower(lower), upper(upper) {}
  double lower;
  double upper;
};

enum class TuningMethod { ChiSquared, DrChebyshevMultivariate, ClosedFormK1, ClosedFormK2, SdpBisection };

std::string to_string(TuningMethod method);

/// A tuned detector threshold together with how it was obtained.
struct ThresholdResult {
  double alpha = 0.0;
  TuningMethod method = TuningMethod::ChiSquared;
  int k = 0;
  double target_rate = 0.0;
  double achieved_worst_case = 0.0;
  double epsilon = 0.0;
  // SdpBisection only.
  double bracket_lower = 0.0;
  double bracket_upper = 0.0;
  int sdp_solves = 0;
  bool bracket_degenerate = false;

  /// `method,k,target_rate,alpha,achieved,epsilon`
  std::string to_csv_row() const;
  static std::string csv_header();
};

/// (1 - rate) quantile of chi-squared(p): 2 P^{-1}(1 - rate, p/2).
double chi_squared_threshold(int dof, double rate);

/// Distributionally robust threshold from mean and covariance of a
/// p-dimensional residual: p / rate.
double dr_threshold_two_moments(int dof, double rate);

/// Closed-form thresholds for k = 1 (M1 / rate) and k = 2. For k = 2 the
/// Cantelli form (1 + sqrt((1 - rate) / rate) C_M) M1 applies while
/// C_M^2 <= delta; otherwise the Markov threshold is already tighter.
ThresholdResult closed_form_threshold(const MomentSequence& moments, double rate, int k);

struct BisectionOptions {
  double epsilon = 1e-4;
  std::optional<double> alpha_lower;  // default: M1
  std::optional<double> alpha_upper;  // default: tuned threshold of order k - 1
  double sdp_tol = 1e-9;
};

/// Bisection on the worst-case alarm probability of the k-moment SDP bound.
/// Returns the upper end of the final bracket, so the worst-case rate at
/// the returned threshold never exceeds `rate`.
ThresholdResult tune_threshold_sdp(const MomentSequence& moments, double rate,
                                   const BisectionOptions& options = {});

/// Dispatch: closed form for k <= 2, SDP bisection above, using the first
/// k moments of `moments`.
ThresholdResult tune_threshold(const MomentSequence& moments, double rate, int k,
                               double epsilon = 1e-4);

}  // namespace drtune
