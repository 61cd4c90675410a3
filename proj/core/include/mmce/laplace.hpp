#pragma once

#include "mmce/types.hpp"

namespace mmce {

/// Scaled complementary error function, exp(x^2) * erfc(x).
/// Stable for large positive x (decays like 1/(x sqrt(pi))); for negative x
/// it grows like 2 exp(x^2) and saturates to +inf once that overflows.
double erfcx(double x);

/// log(erfcx(x)), finite for all x where the direct value would overflow.
double log_erfcx(double x);

/// Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2)).
double gauss_q(double x);

/// First truncated Gaussian moment
/// (1/sqrt(2 pi mu)) * int_0^inf t exp(-(t-gamma)^2 / (2 mu)) dt.
double phi1(double gamma, double mu);

/// Second truncated Gaussian moment, equal to
/// gamma * phi1(gamma, mu) + mu * Q(-gamma / sqrt(mu)).
double phi2(double gamma, double mu);

/// Zero-mean Laplace prior (1/2b) exp(-|x|/b).
struct LaplacePrior {
  double b;

  double mean() const { return 0.0; }
  double variance() const { return 2.0 * b * b; }
};

/// Intermediate quantities of the Laplace posterior under a Gaussian message
/// N(r_hat, mu_r).
struct EdgeQuantities {
  double alpha_minus;
  double alpha_plus;
  double gamma_minus;
  double gamma_plus;
  double psi;  // normalization of the product density
};

EdgeQuantities edge_quantities(double r_hat, double mu_r, double b);

struct DenoiserStats {
  double mean;
  double variance;
  double abs_mean;  // E{|x| | y}, consumed by the EM scale update
};

/// Posterior mean, variance, and absolute first moment of x under the
/// Laplace prior and Gaussian message N(r_hat, mu_r). All quantities are
/// evaluated in an erfcx-based form that stays finite for |r_hat|/sqrt(mu_r)
/// up to 1e4 and mu_r/b^2 up to 1e6.
DenoiserStats laplace_posterior_stats(double r_hat, double mu_r,
                                      const LaplacePrior& prior);

}  // namespace mmce
