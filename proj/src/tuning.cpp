#include "drtune/tuning.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "drtune/bound.hpp"
#include "drtune/gamma.hpp"

namespace drtune {

namespace {

void require_open_unit_rate(double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw DomainError("false-alarm rate must lie in (0, 1)");
}

// Thresholds below the mean are meaningless for detection.
void require_detector_rate(double rate) {
  if (!(rate > 0.0 && rate <= 0.5)) throw DomainError("false-alarm rate must lie in (0, 0.5]");
}

// Bound values within this gap are accurate enough to compare against a rate.
constexpr double kUsableGap = 1e-6;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string to_string(TuningMethod method) {
  switch (method) {
    case TuningMethod::ChiSquared: return "ChiSquared";
    case TuningMethod::DrChebyshevMultivariate: return "DrChebyshevMultivariate";
    case TuningMethod::ClosedFormK1: return "ClosedFormK1";
    case TuningMethod::ClosedFormK2: return "ClosedFormK2";
    case TuningMethod::SdpBisection: return "SdpBisection";
  }
  return "Unknown";
}

std::string ThresholdResult::csv_header() { return "method,k,target_rate,alpha,achieved,epsilon"; }

std::string ThresholdResult::to_csv_row() const {
  return to_string(method) + "," + std::to_string(k) + "," + fmt(target_rate) + "," + fmt(alpha) + "," +
         fmt(achieved_worst_case) + "," + fmt(epsilon);
}

double chi_squared_threshold(int dof, double rate) {
  if (dof < 1) throw DomainError("chi-squared degrees of freedom must be >= 1");
  require_open_unit_rate(rate);
  return 2.0 * inverse_regularized_gamma_p(0.5 * dof, 1.0 - rate);
}

double dr_threshold_two_moments(int dof, double rate) {
  if (dof < 1) throw DomainError("residual dimension must be >= 1");
  require_open_unit_rate(rate);
  return dof / rate;
}

ThresholdResult closed_form_threshold(const MomentSequence& moments, double rate, int k) {
  require_detector_rate(rate);
  if (k != 1 && k != 2) throw InputError("closed-form thresholds exist for k = 1, 2 only; use tune_threshold_sdp");
  if (moments.order() < k) throw InputError("not enough moments for the requested order");
  const MomentSequence m = moments.truncated(k);
  if (!is_feasible(m)) throw DomainError("closed-form threshold: infeasible moments");
  if (!(m.mean() > 0.0)) throw DomainError("closed-form threshold: mean must be positive");

  ThresholdResult out;
  out.k = k;
  out.target_rate = rate;
  const double markov = m.mean() / rate;
  if (k == 1) {
    out.method = TuningMethod::ClosedFormK1;
    out.alpha = markov;
    out.achieved_worst_case = markov_bound(m, out.alpha);
    return out;
  }
  out.method = TuningMethod::ClosedFormK2;
  const double c2 = std::max(0.0, m.squared_cv());
  const double cantelli = (1.0 + std::sqrt((1.0 - rate) / rate * c2)) * m.mean();
  out.alpha = std::min(cantelli, markov);
  out.achieved_worst_case = c2 == 0.0 ? 0.0 : chebyshev_bound(m, out.alpha);
  return out;
}

ThresholdResult tune_threshold_sdp(const MomentSequence& moments, double rate, const BisectionOptions& opt) {
  require_detector_rate(rate);
  const int k = moments.order();
  if (k < 2) throw InputError("SDP bisection needs moments of order >= 2");
  if (!(opt.epsilon > 0.0)) throw InputError("bisection tolerance must be positive");
  if (!is_feasible(moments)) throw DomainError("SDP bisection: infeasible moments");

  double upper = 0.0;
  if (opt.alpha_upper) {
    upper = *opt.alpha_upper;
  } else {
    // Thresholds are non-increasing in k: ground at the k = 2 closed form and
    // climb one order at a time, each result bracketing the next.
    upper = closed_form_threshold(moments, rate, 2).alpha;
    for (int j = 3; j < k; ++j) {
      BisectionOptions inner = opt;
      inner.alpha_upper = upper;
      upper = tune_threshold_sdp(moments.truncated(j), rate, inner).alpha;
    }
  }
  double lower = opt.alpha_lower.value_or(moments.mean());
  if (!(lower > 0.0) || !(upper >= lower)) throw InputError("bisection bracket must satisfy 0 < lower <= upper");

  ThresholdResult out;
  out.method = TuningMethod::SdpBisection;
  out.k = k;
  out.target_rate = rate;
  out.epsilon = opt.epsilon;

  auto bound_at = [&](double alpha) {
    const SdpSolution sol = worst_case_probability(moments, alpha, opt.sdp_tol);
    ++out.sdp_solves;
    if (sol.status != SdpStatus::Optimal && !(sol.duality_gap <= kUsableGap)) {
      throw BisectionError("moment-bound SDP failed at alpha = " + fmt(alpha) + " (" + to_string(sol.status) + ")",
                           lower, upper);
    }
    return sol.objective;
  };

  const double at_lower = bound_at(lower);
  if (at_lower <= rate) {
    out.alpha = lower;
    out.achieved_worst_case = at_lower;
    out.bracket_lower = out.bracket_upper = lower;
    out.bracket_degenerate = true;
    return out;
  }

  double achieved_upper = -1.0;
  while (upper - lower > opt.epsilon) {
    const double mid = 0.5 * (lower + upper);
    const double p = bound_at(mid);
    if (p > rate) {
      lower = mid;
    } else {
      upper = mid;
      achieved_upper = p;
    }
  }
  out.alpha = upper;
  out.bracket_lower = lower;
  out.bracket_upper = upper;
  out.achieved_worst_case = achieved_upper >= 0.0 ? achieved_upper : bound_at(upper);
  return out;
}

ThresholdResult tune_threshold(const MomentSequence& moments, double rate, int k, double epsilon) {
  if (k < 1 || k > moments.order()) throw InputError("requested moment order not available");
  if (k <= 2) {
    ThresholdResult r = closed_form_threshold(moments, rate, k);
    r.epsilon = 0.0;
    return r;
  }
  BisectionOptions opt;
  opt.epsilon = epsilon;
  return tune_threshold_sdp(moments.truncated(k), rate, opt);
}

}  // namespace drtune
