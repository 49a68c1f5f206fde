#include "drtune/lti.hpp"

#include <complex>

#include "drtune/error.hpp"

namespace drtune {

namespace {

bool pbh_full_rank(const Eigen::MatrixXd& A, const Eigen::MatrixXd& other, bool stack_rows) {
  const Eigen::Index n = A.rows();
  Eigen::EigenSolver<Eigen::MatrixXd> eig(A, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> lambda = eig.eigenvalues()(i);
    if (std::abs(lambda) < 1.0) continue;
    Eigen::MatrixXcd shifted = A.cast<std::complex<double>>();
    shifted.diagonal().array() -= lambda;
    Eigen::MatrixXcd stacked;
    if (stack_rows) {
      stacked.resize(n + other.rows(), n);
      stacked << shifted, other.cast<std::complex<double>>();
    } else {
      stacked.resize(n, n + other.cols());
      stacked << shifted, other.cast<std::complex<double>>();
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(stacked);
    lu.setThreshold(1e-10);
    if (lu.rank() < n) return false;
  }
  return true;
}

void require_square(const Eigen::MatrixXd& m, Eigen::Index n, const char* name) {
  if (m.rows() != n || m.cols() != n) throw InputError(std::string(name) + " has the wrong dimensions");
}

void require_symmetric_psd(const Eigen::MatrixXd& m, bool definite, const char* name) {
  if (!m.isApprox(m.transpose(), 1e-12) && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InputError(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double tol = 1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (definite ? !(lmin > tol) : lmin < -tol) {
    throw InputError(std::string(name) + (definite ? " must be positive definite" : " must be positive semidefinite"));
  }
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> eig(m, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_detectable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) { return pbh_full_rank(A, C, true); }

bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) { return pbh_full_rank(A, B, false); }

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

DareSolution solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C, const Eigen::MatrixXd& sigma_w,
                        const Eigen::MatrixXd& sigma_v) {
  const Eigen::Index n = A.rows();
  require_square(A, n, "A");
  if (C.cols() != n) throw InputError("C has the wrong number of columns");
  require_square(sigma_w, n, "sigma_w");
  require_square(sigma_v, C.rows(), "sigma_v");

  DareSolution out;
  Eigen::MatrixXd P = sigma_w;
  // Max-entry norms: Frobenius overflows long before the entries do.
  const double scale = sigma_w.cwiseAbs().maxCoeff();
  for (int it = 1; it <= 100000; ++it) {
    const Eigen::MatrixXd S = C * P * C.transpose() + sigma_v;
    const Eigen::MatrixXd gain = P * C.transpose() * S.ldlt().solve(Eigen::MatrixXd::Identity(S.rows(), S.cols()));
    Eigen::MatrixXd next = A * (P - gain * C * P) * A.transpose() + sigma_w;
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) break;
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (change <= 1e-12 * (P.cwiseAbs().maxCoeff() + scale)) {
      out.iterations = it;
      out.P = P;
      const Eigen::MatrixXd Sf = C * P * C.transpose() + sigma_v;
      out.filter_gain = P * C.transpose() * Sf.ldlt().solve(Eigen::MatrixXd::Identity(Sf.rows(), Sf.cols()));
      out.L = A * out.filter_gain;
      return out;
    }
  }
  throw NumericalError("Riccati iteration did not converge; is (A, C) detectable?");
}

LtiSystem LtiSystem::create(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd K,
                            Eigen::MatrixXd sigma_w, Eigen::MatrixXd sigma_v) {
  const Eigen::Index n = A.rows();
  if (n == 0) throw InputError("A must be non-empty");
  require_square(A, n, "A");
  if (B.rows() != n) throw InputError("B must have as many rows as A");
  if (C.cols() != n) throw InputError("C must have as many columns as A");
  if (K.rows() != B.cols() || K.cols() != n) throw InputError("K must be m x n");
  require_square(sigma_w, n, "sigma_w");
  require_square(sigma_v, C.rows(), "sigma_v");
  require_symmetric_psd(sigma_w, false, "sigma_w");
  require_symmetric_psd(sigma_v, true, "sigma_v");
  if (!is_detectable(A, C)) throw InputError("(A, C) is not detectable");
  if (!is_stabilizable(A, B)) throw InputError("(A, B) is not stabilizable");

  LtiSystem sys;
  const DareSolution dare = solve_dare(A, C, sigma_w, sigma_v);
  sys.P_ = dare.P;
  sys.L_ = dare.L;
  sys.filter_gain_ = dare.filter_gain;
  sys.sigma_r_ = C * dare.P * C.transpose() + sigma_v;
  sys.sigma_r_ = 0.5 * (sys.sigma_r_ + sys.sigma_r_.transpose());
  sys.sigma_r_sqrt_ = symmetric_sqrt(sys.sigma_r_);
  sys.sigma_r_inv_ = sys.sigma_r_.ldlt().solve(Eigen::MatrixXd::Identity(C.rows(), C.rows()));
  sys.A_ = std::move(A);
  sys.B_ = std::move(B);
  sys.C_ = std::move(C);
  sys.K_ = std::move(K);
  sys.sigma_w_ = std::move(sigma_w);
  sys.sigma_v_ = std::move(sigma_v);
  return sys;
}

}  // namespace drtune
