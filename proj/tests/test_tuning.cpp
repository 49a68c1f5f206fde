#include <cmath>

#include <gtest/gtest.h>

#include "drtune/bound.hpp"
#include "drtune/error.hpp"
#include "drtune/tuning.hpp"
#include "random_moments.hpp"

using namespace drtune;
using drtune::testing::random_gamma_mixture_moments;

namespace {

const MomentSequence kChi2({1, 2, 8, 48, 384});

// Frozen reference: bisection on the same moment problem solved with an
// independent conic solver to 1e-9, analytic chi-squared(2) moments.
constexpr double kChi2K4Reference = 9.1819;

}  // namespace

TEST(DrTwoMoments, SpecExamples) {
  EXPECT_DOUBLE_EQ(dr_threshold_two_moments(2, 0.05), 40.0);
  EXPECT_DOUBLE_EQ(dr_threshold_two_moments(2, 0.5), 4.0);
  EXPECT_DOUBLE_EQ(dr_threshold_two_moments(3, 0.1), 30.0);
  EXPECT_THROW(dr_threshold_two_moments(2, 1.0), DomainError);
}

TEST(DrTwoMoments, ConservativeAgainstChiSquared) {
  for (int p = 1; p <= 12; ++p) {
    for (double rate : {1e-4, 0.01, 0.05, 0.2, 0.5}) {
      EXPECT_GE(dr_threshold_two_moments(p, rate), chi_squared_threshold(p, rate)) << p << " " << rate;
    }
  }
}

TEST(ClosedForm, SpecExamples) {
  const ThresholdResult k1 = closed_form_threshold(kChi2, 0.05, 1);
  EXPECT_EQ(k1.method, TuningMethod::ClosedFormK1);
  EXPECT_DOUBLE_EQ(k1.alpha, 40.0);
  EXPECT_NEAR(k1.achieved_worst_case, 0.05, 1e-15);

  const ThresholdResult k2 = closed_form_threshold(kChi2, 0.05, 2);
  EXPECT_NEAR(k2.alpha, (1.0 + std::sqrt(19.0)) * 2.0, 1e-12);
  EXPECT_NEAR(k2.alpha, 10.7178, 1e-4);
  EXPECT_NEAR(k2.achieved_worst_case, 0.05, 1e-12);

  for (double c : {0.5, 1.0, 3.0}) {
    for (double rate : {0.01, 0.3}) {
      EXPECT_NEAR(closed_form_threshold(MomentSequence({1, c, c * c}), rate, 2).alpha, c, 1e-12);
    }
  }
}

TEST(ClosedForm, MarkovTakesOverForLargeVariance) {
  // C^2 = 25 > (1 - rate) / rate: Cantelli would exceed M1 / rate.
  const MomentSequence m({1, 1, 26});
  const ThresholdResult r = closed_form_threshold(m, 0.05, 2);
  EXPECT_DOUBLE_EQ(r.alpha, 20.0);
  EXPECT_NEAR(chebyshev_bound(m, r.alpha), 0.05, 1e-12);
}

TEST(ClosedForm, Errors) {
  EXPECT_THROW(closed_form_threshold(kChi2, 0.05, 3), InputError);
  EXPECT_THROW(closed_form_threshold(kChi2, 0.6, 1), DomainError);
  EXPECT_THROW(closed_form_threshold(MomentSequence({1, 1, 0.5}), 0.05, 2), DomainError);
}

TEST(Bisection, Chi2OrderFour) {
  const ThresholdResult r = tune_threshold(kChi2, 0.05, 4, 1e-4);
  EXPECT_EQ(r.method, TuningMethod::SdpBisection);
  EXPECT_NEAR(r.alpha, kChi2K4Reference, 1e-3);
  EXPECT_NEAR(r.alpha, 9.1315, 0.06);
  EXPECT_LE(r.bracket_upper - r.bracket_lower, 1e-4);
  EXPECT_LE(r.achieved_worst_case, 0.05 + 1e-9);
  // Tight up to epsilon.
  EXPECT_GT(worst_case_probability(kChi2, r.alpha - 2e-4).objective, 0.05 - 1e-9);
}

TEST(Bisection, OrderTwoMatchesClosedForm) {
  const ThresholdResult r = tune_threshold_sdp(kChi2.truncated(2), 0.05, {});
  EXPECT_NEAR(r.alpha, closed_form_threshold(kChi2, 0.05, 2).alpha, 1e-4);
  BisectionOptions opt;
  opt.alpha_upper = 40.0;
  EXPECT_NEAR(tune_threshold_sdp(kChi2.truncated(2), 0.05, opt).alpha, 10.7178, 1e-4);
}

TEST(Bisection, DegenerateBracket) {
  BisectionOptions opt;
  opt.alpha_lower = 30.0;
  opt.alpha_upper = 40.0;
  const ThresholdResult r = tune_threshold_sdp(kChi2, 0.05, opt);
  EXPECT_TRUE(r.bracket_degenerate);
  EXPECT_DOUBLE_EQ(r.alpha, 30.0);
}

TEST(Bisection, Errors) {
  EXPECT_THROW(tune_threshold_sdp(MomentSequence({1, 2}), 0.05, {}), InputError);
  EXPECT_THROW(tune_threshold_sdp(MomentSequence({1, 1, 0.5}), 0.05, {}), DomainError);
  BisectionOptions bad;
  bad.epsilon = 0.0;
  EXPECT_THROW(tune_threshold_sdp(kChi2, 0.05, bad), InputError);
  EXPECT_THROW(tune_threshold(kChi2, 0.05, 5), InputError);
}

TEST(Bisection, ThresholdsShrinkWithOrder) {
  CounterRng rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const MomentSequence m = random_gamma_mixture_moments(rng, 4);
    double prev = INFINITY;
    for (int k = 1; k <= 4; ++k) {
      const double a = tune_threshold(m, 0.05, k).alpha;
      EXPECT_LE(a, prev + 1e-4) << m.to_csv_row() << " k " << k;
      prev = a;
    }
  }
}

TEST(ThresholdResult, Csv) {
  EXPECT_EQ(ThresholdResult::csv_header(), "method,k,target_rate,alpha,achieved,epsilon");
  EXPECT_EQ(closed_form_threshold(kChi2, 0.05, 1).to_csv_row(), "ClosedFormK1,1,0.05,40,0.05,0");
}
