#pragma once

namespace drtune {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Series for x < a + 1, Lentz continued fraction for the complement otherwise.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// without cancellation in the upper tail.
double regularized_gamma_q(double a, double x);

/// x such that P(a, x) = p, for p in (0, 1). Safeguarded Newton on a
/// bracket that is kept valid throughout.
double inverse_regularized_gamma_p(double a, double p);

}  // namespace drtune
