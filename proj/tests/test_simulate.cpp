#include <cmath>

#include <gtest/gtest.h>

#include "drtune/attack.hpp"
#include "drtune/error.hpp"
#include "drtune/simulate.hpp"
#include "drtune/tuning.hpp"
#include "reference_system.hpp"

using namespace drtune;
using namespace drtune::testing;

namespace {

const Eigen::MatrixXd kZero2 = Eigen::MatrixXd::Zero(2, 2);

ResidualTrace ref_trace(long T, std::uint64_t seed) {
  return simulate(ref_system(), gaussian(ref_sigma_w(), seed), gaussian(ref_sigma_v(), seed + 1), T);
}

}  // namespace

TEST(Simulate, NoiselessIsSilent) {
  const ResidualTrace tr = simulate(ref_system(), gaussian(kZero2, 0), gaussian(kZero2, 0), 500);
  EXPECT_EQ(tr.length(), 500);
  EXPECT_TRUE(tr.residuals.isZero());
  for (double q : tr.q_values) EXPECT_EQ(q, 0.0);
}

TEST(Simulate, QRecomputesFromResiduals) {
  const LtiSystem sys = ref_system();
  const ResidualTrace tr = ref_trace(2000, 4);
  for (long t = 0; t < tr.length(); ++t) {
    const Eigen::VectorXd r = tr.residuals.col(t);
    EXPECT_NEAR(tr.q_values[t], r.dot(sys.sigma_r_inv() * r), 1e-12 * (1.0 + tr.q_values[t]));
    EXPECT_GE(tr.q_values[t], 0.0);
  }
}

TEST(Simulate, ResidualStatisticsMatchTheory) {
  const LtiSystem sys = ref_system();
  const ResidualTrace tr = ref_trace(1000000, 21);
  double qsum = 0.0;
  for (double q : tr.q_values) qsum += q;
  EXPECT_NEAR(qsum / tr.length(), 2.0, 0.01);
  const Eigen::MatrixXd cov = tr.residuals * tr.residuals.transpose() / static_cast<double>(tr.length());
  EXPECT_LT((cov - sys.sigma_r()).norm() / sys.sigma_r().norm(), 0.02);

  // Whiteness: normalized lag autocorrelations vanish.
  const double bound = 3.0 / std::sqrt(static_cast<double>(tr.length()));
  for (int lag = 1; lag <= 3; ++lag) {
    for (int i = 0; i < 2; ++i) {
      double num = 0.0;
      for (long t = lag; t < tr.length(); ++t) num += tr.residuals(i, t) * tr.residuals(i, t - lag);
      const double rho = num / (cov(i, i) * tr.length());
      EXPECT_LT(std::abs(rho), bound) << "lag " << lag << " coordinate " << i;
    }
  }
}

TEST(FalseAlarm, EmpiricalRates) {
  const ResidualTrace tr = ref_trace(1000000, 33);
  const double chi = chi_squared_threshold(2, 0.05);
  EXPECT_NEAR(empirical_false_alarm_rate(tr, chi), 0.05, 0.002);
  EXPECT_NEAR(empirical_false_alarm_rate(tr, 9.1315), 0.01, 0.003);
  EXPECT_DOUBLE_EQ(empirical_false_alarm_rate(tr, 0.0), 1.0);
  EXPECT_NEAR(binomial_standard_error(0.05, 1000000), std::sqrt(0.05 * 0.95 / 1e6), 1e-15);
}

TEST(FalseAlarm, StrictInequality) {
  ResidualTrace tr;
  tr.q_values = {1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(empirical_false_alarm_rate(tr, 2.0), 1.0 / 3.0);
  EXPECT_THROW(empirical_false_alarm_rate(ResidualTrace{}, 1.0), InputError);
}

TEST(Simulate, DivergenceIsReported) {
  const Eigen::MatrixXd A = mat2(1.5, 0, 0, 0.2);
  const LtiSystem sys = LtiSystem::create(A, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2),
                                          Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2),
                                          Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(simulate(sys, gaussian(sys.sigma_w(), 1), gaussian(sys.sigma_v(), 2), 1000), InstabilityError);
}

TEST(Simulate, Errors) {
  const LtiSystem sys = ref_system();
  EXPECT_THROW(simulate(sys, gaussian(ref_sigma_w(), 1), gaussian(ref_sigma_v(), 2), 0), InputError);
  EXPECT_THROW(simulate(sys, gaussian(Eigen::MatrixXd::Identity(3, 3), 1), gaussian(ref_sigma_v(), 2), 10),
               InputError);
}

TEST(Simulate, TraceCsv) {
  const ResidualTrace tr = ref_trace(3, 1);
  const std::string csv = tr.to_csv();
  EXPECT_EQ(csv.rfind("t,r_1,r_2,q\n0,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Simulate, Deterministic) {
  const ResidualTrace a = ref_trace(1000, 8), b = ref_trace(1000, 8), c = ref_trace(1000, 9);
  EXPECT_EQ(a.to_csv(), b.to_csv());
  EXPECT_NE(a.to_csv(), c.to_csv());
}

TEST(Attack, NullingAndBoundary) {
  const LtiSystem sys = ref_system();
  const Eigen::Vector2d e(0.3, -0.2), v(0.1, 0.5);
  const double alpha = 9.0;
  // With xhat at the origin, ybar - C xhat = C e + v + delta.
  const Eigen::VectorXd d0 = zero_alarm_attack(sys, alpha, e, v, Eigen::Vector2d::Zero());
  EXPECT_LT((sys.C() * e + v + d0).norm(), 1e-15);

  const Eigen::Vector2d edge(std::sqrt(alpha), 0.0);
  const Eigen::VectorXd r = sys.C() * e + v + zero_alarm_attack(sys, alpha, e, v, edge);
  EXPECT_NEAR(r.dot(sys.sigma_r_inv() * r), alpha, 1e-12);

  EXPECT_THROW(zero_alarm_attack(sys, alpha, e, v, Eigen::Vector2d(3.01, 0.0)), ContractViolation);
}

TEST(Attack, PolicyStaysInsideRegion) {
  for (auto strategy : {DirectionStrategy::Fixed, DirectionStrategy::Rotating}) {
    AttackPolicy p;
    p.alpha = 7.5;
    p.strategy = strategy;
    for (long t = 0; t < 1000; ++t) EXPECT_LE(p.delta_bar(t, 2).squaredNorm(), p.alpha);
  }
  AttackPolicy p;
  p.alpha = 4.0;
  p.direction = Eigen::Vector2d(1.0, 1.0);
  EXPECT_NEAR(p.delta_bar(0, 2).squaredNorm(), 4.0, 1e-8);
  EXPECT_NEAR(p.delta_bar(0, 2)(0), p.delta_bar(0, 2)(1), 1e-15);
}

TEST(Attack, SimulatedAttackRaisesNoAlarms) {
  const LtiSystem sys = ref_system();
  for (auto strategy : {DirectionStrategy::Fixed, DirectionStrategy::Rotating}) {
    for (double alpha : {40.0, 10.7178, 9.1819, 5.99146}) {
      AttackPolicy p;
      p.alpha = alpha;
      p.strategy = strategy;
      const ResidualTrace tr = simulate(sys, gaussian(ref_sigma_w(), 1), gaussian(ref_sigma_v(), 2), 10000, p);
      EXPECT_EQ(alarm_count(tr, alpha), 0) << alpha;
      EXPECT_NEAR(*std::max_element(tr.q_values.begin(), tr.q_values.end()), alpha, 1e-6 * alpha);
    }
  }
}
