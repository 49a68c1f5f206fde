#include <cmath>

#include <gtest/gtest.h>

#include "drtune/error.hpp"
#include "drtune/noise.hpp"
#include "reference_system.hpp"

using namespace drtune;
using namespace drtune::testing;

namespace {

struct Stats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::VectorXd kurtosis;
};

Stats sample_stats(const NoiseModel& model, long n) {
  NoiseSampler s(model);
  const int d = s.dimension();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d), m4 = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(d, d);
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd x = s.sample();
    sum += x;
    outer += x * x.transpose();
    m4 += x.array().pow(4).matrix();
  }
  Stats st;
  st.mean = sum / n;
  st.cov = outer / n;
  st.kurtosis = (m4 / n).array() / st.cov.diagonal().array().square();
  return st;
}

}  // namespace

TEST(CounterRng, DeterministicAndSeedSensitive) {
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  EXPECT_EQ(a.counter(), 100u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
}

TEST(CounterRng, UniformIsOpenInterval) {
  CounterRng r(0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Noise, GaussianMoments) {
  const Stats st = sample_stats(gaussian(ref_sigma_w(), 3), 400000);
  EXPECT_LT(st.mean.norm(), 0.002);
  EXPECT_LT((st.cov - ref_sigma_w()).norm() / ref_sigma_w().norm(), 0.01);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(st.kurtosis(i), 3.0, 0.1);
}

TEST(Noise, LaplacianMatchesCovarianceWithHeavierTails) {
  const NoiseModel m{NoiseFamily::MultivariateLaplacian, mat2(2.0, 0.6, 0.6, 1.0), 9};
  const Stats st = sample_stats(m, 400000);
  EXPECT_LT(st.mean.norm(), 0.01);
  EXPECT_LT((st.cov - m.covariance).norm() / m.covariance.norm(), 0.02);
  // sqrt(e) g has kurtosis 3 E[e^2] = 6.
  for (int i = 0; i < 2; ++i) {
    EXPECT_GT(st.kurtosis(i), 3.0);
    EXPECT_NEAR(st.kurtosis(i), 6.0, 0.5);
  }
}

TEST(Noise, ZeroCovarianceGivesZeros) {
  NoiseSampler s(gaussian(Eigen::MatrixXd::Zero(2, 2), 1));
  EXPECT_TRUE(s.sample().isZero());
}

TEST(Noise, RejectsBadCovariance) {
  EXPECT_THROW(NoiseSampler(gaussian(mat2(1, 0.5, 0, 1), 0)), InputError);
  EXPECT_THROW(NoiseSampler(gaussian(mat2(-1, 0, 0, 1), 0)), InputError);
  EXPECT_THROW(NoiseSampler(gaussian(Eigen::MatrixXd(0, 0), 0)), InputError);
}
