#include "drtune/noise.hpp"

#include <cmath>
#include <numbers>

#include "drtune/error.hpp"
#include "drtune/lti.hpp"

namespace drtune {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t CounterRng::next() { return splitmix(seed_ + (++counter_) * kGolden); }

double CounterRng::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double CounterRng::exponential() { return -std::log(uniform()); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix(seed ^ splitmix(stream + kGolden));
}

const char* to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::MultivariateLaplacian: return "laplacian";
  }
  return "unknown";
}

NoiseSampler::NoiseSampler(const NoiseModel& model) : family_(model.family), rng_(model.seed) {
  const auto& cov = model.covariance;
  if (cov.rows() == 0 || cov.rows() != cov.cols()) throw InputError("noise covariance must be square and non-empty");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
    throw InputError("noise covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff())) {
    throw InputError("noise covariance must be positive semidefinite");
  }
  root_ = symmetric_sqrt(cov);
  zero_ = root_.cwiseAbs().maxCoeff() == 0.0;
  z_.resize(cov.rows());
}

void NoiseSampler::sample_into(Eigen::Ref<Eigen::VectorXd> out) {
  if (zero_) {
    out.setZero();
    return;
  }
  for (Eigen::Index i = 0; i < z_.size(); ++i) z_(i) = rng_.normal();
  if (family_ == NoiseFamily::MultivariateLaplacian) z_ *= std::sqrt(rng_.exponential());
  out.noalias() = root_ * z_;
}

Eigen::VectorXd NoiseSampler::sample() {
  Eigen::VectorXd out(z_.size());
  sample_into(out);
  return out;
}

}  // namespace drtune
