#include "drtune/gamma.hpp"

#include <cmath>
#include <limits>

#include "drtune/error.hpp"

namespace drtune {

namespace {

constexpr int kMaxTerms = 1000;
constexpr double kEps = 1e-16;

double log_prefactor(double a, double x) {
  return a * std::log(x) - x - std::lgamma(a);
}

double series_p(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor(a, x));
}

double continued_fraction_q(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * h;
}

void check_args(double a, double x) {
  if (!(a > 0.0)) throw DomainError("incomplete gamma needs a > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma needs x >= 0");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return series_p(a, x);
  return 1.0 - continued_fraction_q(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - series_p(a, x);
  return continued_fraction_q(a, x);
}

double inverse_regularized_gamma_p(double a, double p) {
  if (!(a > 0.0)) throw DomainError("inverse incomplete gamma needs a > 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("inverse incomplete gamma needs p in (0, 1)");

  // Residual measured on whichever tail is smaller to keep relative accuracy.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  auto residual = [&](double x) {
    return upper ? target - regularized_gamma_q(a, x) : regularized_gamma_p(a, x) - target;
  };

  double lo = 0.0;
  double hi = std::max(1.0, a);
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("inverse incomplete gamma: bracket overflow");
  }

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = residual(x);
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    // dP/dx = x^{a-1} e^{-x} / Gamma(a); identical for the Q-based residual.
    const double deriv = std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
    double next = x - f / deriv;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace drtune
