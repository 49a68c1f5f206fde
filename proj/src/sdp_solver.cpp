#include "drtune/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drtune/error.hpp"

namespace drtune {

namespace {

// Iterates are carried in extended precision; the blocks are tiny and the
// Schur system becomes ill-conditioned as the gap closes.
using Real = long double;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr Real kInf = std::numeric_limits<Real>::infinity();

Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

Real inner(const Mat& a, const Mat& b) { return a.cwiseProduct(b).sum(); }

// W = G G' with G^{-1} X G^{-T} = G' S G = diag(d).
struct NtScaling {
  Mat G;
  Mat Ginv;
  Mat W;
  Vec d;
};

bool nt_scaling(const Mat& X, const Mat& S, NtScaling& out) {
  const Eigen::Index n = X.rows();
  Eigen::LLT<Mat> lx(X);
  Eigen::LLT<Mat> ls(S);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
  const Mat Lx = lx.matrixL();
  const Mat Ls = ls.matrixL();
  Eigen::JacobiSVD<Mat> svd(Ls.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.d = svd.singularValues();
  if (!(out.d.minCoeff() > 0.0) || !out.d.allFinite()) return false;
  const Mat& V = svd.matrixV();
  const Mat LxInv = Lx.triangularView<Eigen::Lower>().solve(Mat::Identity(n, n));
  out.G = Lx * V * out.d.cwiseSqrt().cwiseInverse().asDiagonal();
  out.Ginv = out.d.cwiseSqrt().asDiagonal() * V.transpose() * LxInv;
  out.W = sym(out.G * out.G.transpose());
  return out.W.allFinite();
}

// Largest t with X + t dX PSD (infinite if dX keeps X PSD for all t >= 0).
Real max_step(const Mat& X, const Mat& dX) {
  Eigen::LLT<Mat> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Mat L = llt.matrixL();
  const Mat T = L.triangularView<Eigen::Lower>().solve(dX);
  const Mat U = L.triangularView<Eigen::Lower>().solve(T.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym(U), Eigen::EigenvaluesOnly);
  const Real lmin = eig.eigenvalues().minCoeff();
  return lmin < 0 ? -1 / lmin : kInf;
}

struct Direction {
  std::vector<Mat> dX;
  std::vector<Mat> dS;
  Vec dy;
  Vec du;
};

}  // namespace

BlockSdpResult solve_block_sdp(const BlockSdp& prob, const SdpOptions& opt) {
  const int nb = static_cast<int>(prob.block_sizes.size());
  const int m = static_cast<int>(prob.rows.size());
  const int nf = static_cast<int>(prob.free_cost.size());
  if (prob.rhs.size() != m || prob.free_coeffs.rows() != m || prob.free_coeffs.cols() != nf) {
    throw InputError("block SDP: inconsistent constraint dimensions");
  }
  if (!prob.block_costs.empty() && static_cast<int>(prob.block_costs.size()) != nb) {
    throw InputError("block SDP: one cost matrix per block expected");
  }

  std::vector<std::vector<int>> rows_of(static_cast<std::size_t>(nb));
  std::vector<Mat> A(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& row = prob.rows[static_cast<std::size_t>(i)];
    if (row.block < 0 || row.block >= nb ||
        row.coeff.rows() != prob.block_sizes[static_cast<std::size_t>(row.block)] ||
        row.coeff.cols() != row.coeff.rows()) {
      throw InputError("block SDP: constraint matrix does not match its block");
    }
    rows_of[static_cast<std::size_t>(row.block)].push_back(i);
    A[static_cast<std::size_t>(i)] = row.coeff.cast<Real>();
  }
  std::vector<Mat> C(static_cast<std::size_t>(nb));
  int total_dim = 0;
  for (int b = 0; b < nb; ++b) {
    const int s = prob.block_sizes[static_cast<std::size_t>(b)];
    total_dim += s;
    C[static_cast<std::size_t>(b)] =
        prob.block_costs.empty() ? Mat::Zero(s, s) : Mat(prob.block_costs[static_cast<std::size_t>(b)].cast<Real>());
  }
  const Mat F = prob.free_coeffs.cast<Real>();
  const Vec bvec = prob.rhs.cast<Real>();
  const Vec cvec = prob.free_cost.cast<Real>();

  auto apply_A = [&](const std::vector<Mat>& X) {
    Vec out(m);
    for (int i = 0; i < m; ++i) out(i) = inner(A[static_cast<std::size_t>(i)], X[static_cast<std::size_t>(prob.rows[static_cast<std::size_t>(i)].block)]);
    return out;
  };
  auto apply_At = [&](const Vec& y) {
    std::vector<Mat> out(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) {
      const int s = prob.block_sizes[static_cast<std::size_t>(b)];
      out[static_cast<std::size_t>(b)] = Mat::Zero(s, s);
      for (int i : rows_of[static_cast<std::size_t>(b)]) out[static_cast<std::size_t>(b)] += y(i) * A[static_cast<std::size_t>(i)];
    }
    return out;
  };

  // Iterate.
  std::vector<Mat> X(static_cast<std::size_t>(nb));
  std::vector<Mat> S(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    const int s = prob.block_sizes[static_cast<std::size_t>(b)];
    X[static_cast<std::size_t>(b)] = static_cast<Real>(opt.initial_scale) * Mat::Identity(s, s);
    S[static_cast<std::size_t>(b)] = static_cast<Real>(opt.initial_scale) * Mat::Identity(s, s);
  }
  Vec u = opt.initial_free.size() == nf ? Vec(opt.initial_free.cast<Real>()) : Vec(Vec::Zero(nf));
  Vec y = Vec::Zero(m);

  const Real b_norm = bvec.norm();
  Real c_norm = cvec.norm();
  for (const auto& cb : C) c_norm += cb.norm();

  BlockSdpResult res;
  auto export_iterate = [&](SdpStatus status, int iter) {
    res.status = status;
    res.iterations = iter;
    res.X.clear();
    res.S.clear();
    for (int b = 0; b < nb; ++b) {
      res.X.push_back(X[static_cast<std::size_t>(b)].cast<double>());
      res.S.push_back(S[static_cast<std::size_t>(b)].cast<double>());
    }
    res.free = u.cast<double>();
    res.dual = y.cast<double>();
    return res;
  };

  std::vector<Mat> rows_scaled(static_cast<std::size_t>(m));

  for (int iter = 0;; ++iter) {
    const Vec rp = bvec - apply_A(X) - F * u;
    const std::vector<Mat> Aty = apply_At(y);
    std::vector<Mat> Rd(static_cast<std::size_t>(nb));
    Real rd_norm = 0;
    Real xs = 0;
    Real pobj = cvec.dot(u);
    for (int b = 0; b < nb; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      Rd[bi] = C[bi] - Aty[bi] - S[bi];
      rd_norm += Rd[bi].norm();
      xs += inner(X[bi], S[bi]);
      pobj += inner(C[bi], X[bi]);
    }
    const Vec rc = cvec - F.transpose() * y;
    rd_norm += rc.norm();
    const Real dobj = bvec.dot(y);

    res.primal_objective = static_cast<double>(pobj);
    res.dual_objective = static_cast<double>(dobj);
    res.complementarity = static_cast<double>(xs);
    res.primal_infeasibility = static_cast<double>(rp.norm() / (1 + b_norm));
    res.dual_infeasibility = static_cast<double>(rd_norm / (1 + c_norm));
    const Real rel_gap = std::max(xs, std::abs(pobj - dobj)) / (1 + std::abs(pobj) + std::abs(dobj));

    if (res.primal_infeasibility <= opt.tol && res.dual_infeasibility <= opt.tol && rel_gap <= opt.tol) {
      return export_iterate(SdpStatus::Optimal, iter);
    }
    if (iter == opt.max_iterations) return export_iterate(SdpStatus::MaxIter, iter);

    const Real mu = xs / total_dim;

    std::vector<NtScaling> nt(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) {
      if (!nt_scaling(X[static_cast<std::size_t>(b)], S[static_cast<std::size_t>(b)], nt[static_cast<std::size_t>(b)])) {
        return export_iterate(SdpStatus::NumericalTrouble, iter);
      }
    }

    // Augmented system [H F; F' 0] with H_ij = <A_i, W A_j W> (block diagonal).
    Mat kkt = Mat::Zero(m + nf, m + nf);
    for (int b = 0; b < nb; ++b) {
      const Mat& W = nt[static_cast<std::size_t>(b)].W;
      for (int j : rows_of[static_cast<std::size_t>(b)]) {
        rows_scaled[static_cast<std::size_t>(j)] = W * A[static_cast<std::size_t>(j)] * W;
      }
      for (int i : rows_of[static_cast<std::size_t>(b)]) {
        for (int j : rows_of[static_cast<std::size_t>(b)]) {
          kkt(i, j) = inner(A[static_cast<std::size_t>(i)], rows_scaled[static_cast<std::size_t>(j)]);
        }
      }
    }
    kkt.topRightCorner(m, nf) = F;
    kkt.bottomLeftCorner(nf, m) = F.transpose();
    // Ill-conditioned near the optimum; a breakdown shows up as non-finite steps.
    const Eigen::FullPivLU<Mat> lu(kkt);

    // Direction for a scaled complementarity target Rc (per block):
    // dX + W dS W = G Rc G'.
    auto direction = [&](const std::vector<Mat>& Rc) {
      Direction dir;
      dir.dX.resize(static_cast<std::size_t>(nb));
      dir.dS.resize(static_cast<std::size_t>(nb));
      std::vector<Mat> Rx(static_cast<std::size_t>(nb));
      Vec rhs(m + nf);
      rhs.head(m) = rp;
      rhs.tail(nf) = rc;
      for (int b = 0; b < nb; ++b) {
        const auto bi = static_cast<std::size_t>(b);
        Rx[bi] = nt[bi].G * Rc[bi] * nt[bi].G.transpose();
        const Mat WRdW = nt[bi].W * Rd[bi] * nt[bi].W;
        for (int i : rows_of[bi]) {
          const Mat& Ai = A[static_cast<std::size_t>(i)];
          rhs(i) += inner(Ai, WRdW) - inner(Ai, Rx[bi]);
        }
      }
      Vec sol = lu.solve(rhs);
      sol += lu.solve(rhs - kkt * sol);
      dir.dy = sol.head(m);
      dir.du = sol.tail(nf);
      const std::vector<Mat> Atdy = apply_At(dir.dy);
      for (int b = 0; b < nb; ++b) {
        const auto bi = static_cast<std::size_t>(b);
        dir.dS[bi] = sym(Rd[bi] - Atdy[bi]);
        dir.dX[bi] = sym(Rx[bi] - nt[bi].W * dir.dS[bi] * nt[bi].W);
      }
      return dir;
    };
    auto step_lengths = [&](const Direction& dir) {
      Real ap = kInf;
      Real ad = kInf;
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(X[static_cast<std::size_t>(b)], dir.dX[static_cast<std::size_t>(b)]));
        ad = std::min(ad, max_step(S[static_cast<std::size_t>(b)], dir.dS[static_cast<std::size_t>(b)]));
      }
      return std::pair{ap, ad};
    };

    // Predictor: target XS = 0, i.e. Rc = -diag(d).
    std::vector<Mat> Rc(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b) Rc[static_cast<std::size_t>(b)] = -Mat(nt[static_cast<std::size_t>(b)].d.asDiagonal());
    const Direction aff = direction(Rc);
    if (!aff.dy.allFinite() || !aff.du.allFinite()) return export_iterate(SdpStatus::NumericalTrouble, iter);
    auto [ap_aff, ad_aff] = step_lengths(aff);
    ap_aff = std::min<Real>(1, ap_aff);
    ad_aff = std::min<Real>(1, ad_aff);
    Real xs_aff = 0;
    for (int b = 0; b < nb; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      xs_aff += inner(X[bi] + ap_aff * aff.dX[bi], S[bi] + ad_aff * aff.dS[bi]);
    }
    const Real sigma = std::clamp<Real>(std::pow(std::max<Real>(xs_aff, 0) / xs, 3), 0, 1);

    // Corrector: d Rc + Rc d = 2 sigma mu I - 2 d^2 - (dX~ dS~ + dS~ dX~).
    for (int b = 0; b < nb; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      const Vec& d = nt[bi].d;
      const Mat dxs = nt[bi].Ginv * aff.dX[bi] * nt[bi].Ginv.transpose();
      const Mat dss = nt[bi].G.transpose() * aff.dS[bi] * nt[bi].G;
      Mat rhs = -(dxs * dss + dss * dxs);
      for (Eigen::Index i = 0; i < d.size(); ++i) rhs(i, i) += 2 * sigma * mu - 2 * d(i) * d(i);
      for (Eigen::Index i = 0; i < d.size(); ++i)
        for (Eigen::Index j = 0; j < d.size(); ++j) rhs(i, j) /= d(i) + d(j);
      Rc[bi] = sym(rhs);
    }
    const Direction dir = direction(Rc);
    const auto [ap_max, ad_max] = step_lengths(dir);
    constexpr Real tau = 0.95;
    const Real ap = std::min<Real>(1, tau * ap_max);
    const Real ad = std::min<Real>(1, tau * ad_max);
    if (!(ap > 0) || !(ad > 0) || !std::isfinite(ap) || !std::isfinite(ad)) {
      return export_iterate(SdpStatus::NumericalTrouble, iter);
    }
    for (int b = 0; b < nb; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      X[bi] = sym(X[bi] + ap * dir.dX[bi]);
      S[bi] = sym(S[bi] + ad * dir.dS[bi]);
    }
    u += ap * dir.du;
    y += ad * dir.dy;
    if (!u.allFinite() || !y.allFinite()) return export_iterate(SdpStatus::NumericalTrouble, iter);
  }
}

}  // namespace drtune
