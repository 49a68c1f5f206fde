#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace drtune {

/// SplitMix64 stream: the k-th draw is a pure function of (seed, k).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t next();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Mixes a seed with a stream index so that sibling streams do not overlap.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class NoiseFamily { Gaussian, MultivariateLaplacian };

const char* to_string(NoiseFamily f);

struct NoiseModel {
  NoiseFamily family = NoiseFamily::Gaussian;
  Eigen::MatrixXd covariance;
  std::uint64_t seed = 0;
};

/// Zero-mean samples with the model covariance. The Laplacian family is the
/// scale mixture sqrt(e) * g with e ~ Exp(1), g ~ N(0, covariance).
class NoiseSampler {
 public:
  explicit NoiseSampler(const NoiseModel& model);

  Eigen::VectorXd sample();
  void sample_into(Eigen::Ref<Eigen::VectorXd> out);
  int dimension() const { return static_cast<int>(root_.rows()); }

 private:
  NoiseFamily family_;
  Eigen::MatrixXd root_;
  bool zero_ = false;
  CounterRng rng_;
  Eigen::VectorXd z_;
};

}  // namespace drtune
