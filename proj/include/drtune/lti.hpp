#pragma once

#include <Eigen/Dense>

namespace drtune {

double spectral_radius(const Eigen::MatrixXd& m);

/// PBH tests: every eigenvalue with |lambda| >= 1 must be observable
/// (controllable) through C (B).
bool is_detectable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);
bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Symmetric PSD square root via eigendecomposition (negative eigenvalues
/// from rounding are clipped to zero).
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m);

struct DareSolution {
  Eigen::MatrixXd P;            // steady-state prior error covariance
  Eigen::MatrixXd L;            // predictor gain A P C' (C P C' + Sv)^-1
  Eigen::MatrixXd filter_gain;  // P C' (C P C' + Sv)^-1
  int iterations = 0;
};

/// Fixed-point iteration of P <- A (P - P C' (C P C' + Sv)^-1 C P) A' + Sw,
/// started at Sw, to relative tolerance 1e-12. Throws NumericalError after
/// 1e5 iterations.
DareSolution solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                        const Eigen::MatrixXd& sigma_w, const Eigen::MatrixXd& sigma_v);

/// Plant x+ = A x + B u + w, y = C x + v, with static estimator feedback
/// u = K xhat and a steady-state Kalman predictor.
class LtiSystem {
 public:
  /// Validates dimensions, detectability, stabilizability and noise
  /// covariances, then solves the Riccati equation.
  static LtiSystem create(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd K,
                          Eigen::MatrixXd sigma_w, Eigen::MatrixXd sigma_v);

  int n() const { return static_cast<int>(A_.rows()); }
  int m() const { return static_cast<int>(B_.cols()); }
  int p() const { return static_cast<int>(C_.rows()); }

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::MatrixXd& C() const { return C_; }
  const Eigen::MatrixXd& K() const { return K_; }
  const Eigen::MatrixXd& sigma_w() const { return sigma_w_; }
  const Eigen::MatrixXd& sigma_v() const { return sigma_v_; }
  const Eigen::MatrixXd& P() const { return P_; }
  const Eigen::MatrixXd& L() const { return L_; }
  const Eigen::MatrixXd& filter_gain() const { return filter_gain_; }
  const Eigen::MatrixXd& sigma_r() const { return sigma_r_; }
  const Eigen::MatrixXd& sigma_r_sqrt() const { return sigma_r_sqrt_; }
  const Eigen::MatrixXd& sigma_r_inv() const { return sigma_r_inv_; }

  /// A + B K, the state block of the joint closed-loop dynamics.
  Eigen::MatrixXd closed_loop() const { return A_ + B_ * K_; }
  /// A - L C, the estimation-error dynamics.
  Eigen::MatrixXd estimator_loop() const { return A_ - L_ * C_; }

 private:
  LtiSystem() = default;

  Eigen::MatrixXd A_, B_, C_, K_, sigma_w_, sigma_v_;
  Eigen::MatrixXd P_, L_, filter_gain_, sigma_r_, sigma_r_sqrt_, sigma_r_inv_;
};

}  // namespace drtune
