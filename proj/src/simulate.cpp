#include "drtune/simulate.hpp"

#include <cmath>
#include <cstdio>

#include "drtune/error.hpp"

namespace drtune {

std::string ResidualTrace::to_csv() const {
  std::string out = "t";
  for (Eigen::Index i = 0; i < residuals.rows(); ++i) out += ",r_" + std::to_string(i + 1);
  out += ",q\n";
  char buf[32];
  for (long t = 0; t < length(); ++t) {
    out += std::to_string(t);
    for (Eigen::Index i = 0; i < residuals.rows(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", residuals(i, t));
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", q_values[static_cast<std::size_t>(t)]);
    out += buf;
  }
  return out;
}

ResidualTrace simulate(const LtiSystem& sys, const NoiseModel& noise_w, const NoiseModel& noise_v, long T,
                       const std::optional<AttackPolicy>& attack, const SimulationOptions& options) {
  if (T < 1) throw InputError("simulation length must be at least 1");
  if (options.burn_in < 0) throw InputError("burn-in must be nonnegative");
  if (noise_w.covariance.rows() != sys.n() || noise_v.covariance.rows() != sys.p()) {
    throw InputError("noise dimensions do not match the system");
  }
  NoiseSampler wgen(noise_w);
  NoiseSampler vgen(noise_v);

  const int n = sys.n(), p = sys.p();
  const Eigen::MatrixXd& A = sys.A();
  const Eigen::MatrixXd& B = sys.B();
  const Eigen::MatrixXd& C = sys.C();
  const Eigen::MatrixXd& K = sys.K();
  const Eigen::MatrixXd& L = sys.L();
  const Eigen::MatrixXd& Sinv = sys.sigma_r_inv();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n), xhat = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w(n), v(p), y(p), r(p), u(B.cols());

  ResidualTrace trace;
  trace.residuals.resize(p, T);
  trace.q_values.resize(static_cast<std::size_t>(T));

  const long total = options.burn_in + T;
  for (long step = 0; step < total; ++step) {
    const long t = step - options.burn_in;
    wgen.sample_into(w);
    vgen.sample_into(v);
    y.noalias() = C * x;
    y += v;
    if (attack && t >= 0) y += zero_alarm_attack(sys, attack->alpha, x - xhat, v, attack->delta_bar(t, p));
    r = y;
    r.noalias() -= C * xhat;
    u.noalias() = K * xhat;
    if (t >= 0) {
      trace.residuals.col(t) = r;
      trace.q_values[static_cast<std::size_t>(t)] = std::max(0.0, r.dot(Sinv * r));
    }
    Eigen::VectorXd xhat_next = A * xhat + B * u + L * r;
    x = A * x + B * u + w;
    xhat = std::move(xhat_next);
    if (!(x.norm() <= options.divergence_limit)) {
      throw InstabilityError("state diverged at step " + std::to_string(step) + "; spectral radius of A + BK is " +
                             std::to_string(spectral_radius(sys.closed_loop())));
    }
  }
  return trace;
}

long alarm_count(const ResidualTrace& trace, double alpha) {
  long count = 0;
  for (double q : trace.q_values) count += q > alpha ? 1 : 0;
  return count;
}

double empirical_false_alarm_rate(const ResidualTrace& trace, double alpha) {
  if (trace.length() == 0) throw InputError("empty trace");
  return static_cast<double>(alarm_count(trace, alpha)) / static_cast<double>(trace.length());
}

double binomial_standard_error(double rate, long trials) {
  if (trials < 1) throw InputError("trials must be positive");
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

}  // namespace drtune
