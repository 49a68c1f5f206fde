#include "drtune/reach.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>

#include "drtune/error.hpp"
#include "drtune/noise.hpp"

namespace drtune {

namespace {

// Relative to trace(Q), so a uniformly small ellipsoid is not mistaken for a flat one.
constexpr double kFlat = 1e-14;

}  // namespace

double Ellipsoid::support(const Eigen::VectorXd& l) const { return std::sqrt(std::max(0.0, l.dot(Q * l))); }

Eigen::VectorXd Ellipsoid::support_point(const Eigen::VectorXd& l) const {
  const Eigen::VectorXd Ql = Q * l;
  const double s = l.dot(Ql);
  if (s <= kFlat * Q.trace() * l.squaredNorm()) return Eigen::VectorXd::Zero(l.size());
  return Ql / std::sqrt(s);
}

double ReachBound::support(const Eigen::VectorXd& l) const {
  double h = 0.0;
  for (const auto& e : ellipsoids) h += e.support(l);
  return h;
}

bool ReachBound::degenerate() const {
  return std::all_of(ellipsoids.begin(), ellipsoids.end(),
                     [](const Ellipsoid& e) { return e.Q.cwiseAbs().maxCoeff() == 0.0; });
}

std::string ReachBound::boundary_csv() const {
  if (!boundary.empty() && boundary.front().point.size() != 2) throw InputError("boundary export needs n = 2");
  std::string out = "theta,x1,x2\n";
  char buf[96];
  for (const auto& b : boundary) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", b.theta, b.point(0), b.point(1));
    out += buf;
  }
  return out;
}

double noise_threshold(int n, double rate) {
  if (n < 1) throw InputError("dimension must be positive");
  if (!(rate > 0.0 && rate < 1.0)) throw InputError("rate must lie in (0, 1)");
  return static_cast<double>(n) / rate;
}

ReachBound reach_bound(const LtiSystem& sys, double w_bar, double alpha, int t, int n_dirs,
                       std::uint64_t direction_seed) {
  if (t < 2) throw InputError("horizon must be at least 2");
  if (n_dirs < 16) throw InputError("need at least 16 directions");
  if (!(w_bar >= 0.0) || !(alpha >= 0.0) || !std::isfinite(w_bar) || !std::isfinite(alpha)) {
    throw InputError("w_bar and alpha must be finite and nonnegative");
  }
  const int n = sys.n();
  const Eigen::MatrixXd& A = sys.A();
  const Eigen::MatrixXd Acl = sys.closed_loop();
  const Eigen::MatrixXd attack_shape = sys.L() * sys.sigma_r() * sys.L().transpose();

  ReachBound rb;
  rb.horizon = t;
  rb.w_bar = w_bar;
  rb.alpha = alpha;

  Eigen::MatrixXd Ai = Eigen::MatrixXd::Identity(n, n), Acli = Eigen::MatrixXd::Identity(n, n);
  auto push_terms = [&](std::vector<Ellipsoid>& out) {
    const Eigen::MatrixXd H = Acli - Ai;
    Eigen::MatrixXd Qw = w_bar * (Ai * sys.sigma_w() * Ai.transpose());
    Eigen::MatrixXd Qa = alpha * (H * attack_shape * H.transpose());
    out.push_back({0.5 * (Qw + Qw.transpose())});
    out.push_back({0.5 * (Qa + Qa.transpose())});
    Ai = A * Ai;
    Acli = Acl * Acli;
  };
  for (int i = 0; i <= t - 2; ++i) push_terms(rb.ellipsoids);

  rb.series_converges = spectral_radius(A) < 1.0 && spectral_radius(Acl) < 1.0;
  if (rb.series_converges) {
    // Sum the largest semi-axes of the omitted terms until they stop mattering.
    double tail = 0.0;
    std::vector<Ellipsoid> extra;
    for (int i = t - 1; i < t - 1 + 100000; ++i) {
      extra.clear();
      push_terms(extra);
      double term = 0.0;
      for (const auto& e : extra) term += std::sqrt(std::max(0.0, e.Q.norm()));
      tail += term;
      if (term <= 1e-15 * std::max(tail, 1.0)) break;
    }
    rb.truncation_bound = tail;
  } else {
    rb.truncation_bound = std::numeric_limits<double>::infinity();
  }

  rb.boundary.reserve(static_cast<std::size_t>(n_dirs));
  CounterRng rng(direction_seed);
  for (int d = 0; d < n_dirs; ++d) {
    BoundarySample s;
    if (n == 2) {
      s.theta = 2.0 * std::numbers::pi * d / n_dirs;
      s.direction = Eigen::Vector2d(std::cos(s.theta), std::sin(s.theta));
    } else {
      s.direction.resize(n);
      do {
        for (int i = 0; i < n; ++i) s.direction(i) = rng.normal();
      } while (s.direction.norm() == 0.0);
      s.direction.normalize();
    }
    s.point = Eigen::VectorXd::Zero(n);
    for (const auto& e : rb.ellipsoids) s.point += e.support_point(s.direction);
    s.support = rb.support(s.direction);
    rb.boundary.push_back(std::move(s));
  }

  if (n == 2) {
    std::vector<Eigen::Vector2d> poly;
    poly.reserve(rb.boundary.size());
    for (const auto& s : rb.boundary) poly.emplace_back(s.point(0), s.point(1));
    rb.area = polygon_area(poly);
  }
  return rb;
}

double polygon_area(const std::vector<Eigen::Vector2d>& v) {
  const std::size_t m = v.size();
  if (m < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % m];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

bool is_convex_polygon(const std::vector<Eigen::Vector2d>& v, double tol) {
  const std::size_t m = v.size();
  if (m < 3) return true;
  double scale = 0.0;
  for (const auto& p : v) scale = std::max(scale, p.norm());
  const double eps = tol * std::max(scale * scale, 1e-300);
  int sign = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d e1 = v[(i + 1) % m] - v[i];
    const Eigen::Vector2d e2 = v[(i + 2) % m] - v[(i + 1) % m];
    const double cross = e1.x() * e2.y() - e1.y() * e2.x();
    if (std::abs(cross) <= eps) continue;
    const int s = cross > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

double monte_carlo_volume(const ReachBound& bound, long samples, std::uint64_t seed) {
  if (samples < 1) throw InputError("need at least one sample");
  if (bound.ellipsoids.empty()) return 0.0;
  const Eigen::Index n = bound.ellipsoids.front().Q.rows();
  Eigen::VectorXd half(n);
  for (Eigen::Index i = 0; i < n; ++i) half(i) = bound.support(Eigen::VectorXd::Unit(n, i));
  const double box = (2.0 * half).prod();
  if (box == 0.0) return 0.0;
  CounterRng rng(seed);
  long inside = 0;
  Eigen::VectorXd x(n);
  for (long s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) x(i) = (2.0 * rng.uniform() - 1.0) * half(i);
    bool ok = true;
    for (const auto& b : bound.boundary) {
      if (b.direction.dot(x) > b.support) {
        ok = false;
        break;
      }
    }
    inside += ok ? 1 : 0;
  }
  return box * static_cast<double>(inside) / static_cast<double>(samples);
}

OrderingReport volume_comparison(const std::vector<ReachBound>& bounds, double tol) {
  if (bounds.empty()) throw InputError("no bounds to compare");
  const ReachBound& ref = bounds.front();
  for (const auto& b : bounds) {
    if (b.horizon != ref.horizon || b.w_bar != ref.w_bar || b.boundary.size() != ref.boundary.size() ||
        b.ellipsoids.size() != ref.ellipsoids.size()) {
      throw InputError("reach bounds were built with different configurations");
    }
    for (std::size_t d = 0; d < b.boundary.size(); ++d) {
      if (b.boundary[d].direction != ref.boundary[d].direction) throw InputError("direction sets differ");
    }
    for (std::size_t i = 0; i < b.ellipsoids.size(); i += 2) {
      if ((b.ellipsoids[i].Q - ref.ellipsoids[i].Q).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + ref.ellipsoids[i].Q.norm())) {
        throw InputError("reach bounds come from different systems");
      }
    }
  }

  std::vector<std::size_t> order(bounds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return bounds[a].alpha > bounds[b].alpha; });

  auto area_of = [&](const ReachBound& b) {
    return b.area ? *b.area : monte_carlo_volume(b, 200000, 1);
  };

  OrderingReport rep;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const ReachBound& cur = bounds[order[k]];
    OrderingEntry e;
    e.alpha = cur.alpha;
    e.area = area_of(cur);
    if (k + 1 < order.size()) {
      const ReachBound& next = bounds[order[k + 1]];
      for (std::size_t d = 0; d < cur.boundary.size(); ++d) {
        e.max_violation = std::max(e.max_violation, next.boundary[d].support - cur.boundary[d].support);
      }
      e.contains_next = e.max_violation <= tol * (1.0 + cur.boundary.front().support);
    }
    rep.entries.push_back(e);
  }
  for (std::size_t k = 0; k + 1 < rep.entries.size(); ++k) {
    const auto& a = rep.entries[k];
    const auto& b = rep.entries[k + 1];
    if (b.area > a.area * (1.0 + tol)) rep.areas_monotone = false;
    if (a.alpha > b.alpha && !(b.area < a.area)) rep.areas_strictly_decreasing = false;
    if (!a.contains_next) rep.nested = false;
  }
  return rep;
}

}  // namespace drtune
