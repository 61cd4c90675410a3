#include "mmce/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmce {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kLog2 = 0.6931471805599453094;
constexpr double kHalfLog2Pi = 0.9189385332046727418;  // log(2*pi)/2

// Laplace continued fraction for erfcx on [8, inf), evaluated with the
// modified Lentz scheme: erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + ...)))
double erfcx_cf(double x) {
  const double tiny = 1e-300;
  double f = x > tiny ? x : tiny;
  double c = f;
  double d = 0.0;
  for (int n = 1; n < 300; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return 1.0 / (kSqrtPi * f);
}

// Tail of the same fraction: erfcx(x) = (1/sqrt(pi)) / (x + K(x)) with
// K(x) = (1/2)/(x + 1/(x + (3/2)/(x + ...))). Evaluating K directly keeps
// full relative accuracy where erfcx itself is within O(eps) of 1/(sqrt(pi) x).
double erfcx_cf_tail(double x) {
  const double tiny = 1e-300;
  double f = x > tiny ? x : tiny;
  double c = f;
  double d = 0.0;
  for (int n = 2; n < 300; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return 0.5 / f;
}

double erfcx_nonneg(double x) {
  if (x < 8.0) return std::exp(x * x) * std::erfc(x);
  return erfcx_cf(x);
}

double logsumexp2(double a, double b) {
  const double hi = std::max(a, b);
  if (std::isinf(hi) && hi < 0) return hi;
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw std::domain_error(std::string(name) + " must be > 0");
  }
}

}  // namespace

double erfcx(double x) {
  if (x >= 0.0) return erfcx_nonneg(x);
  // erfcx(x) = 2 exp(x^2) - erfcx(-x); the subtrahend is at most 1 while the
  // leading term is >= 2, so there is no cancellation.
  const double x2 = x * x;
  if (x2 > 709.0) return std::numeric_limits<double>::infinity();
  return 2.0 * std::exp(x2) - erfcx_nonneg(-x);
}

double log_erfcx(double x) {
  if (x > -6.0) return std::log(erfcx(x));
  // For x <= -6 the reflection term erfcx(-x) exp(-x^2) is below 1e-17.
  return x * x + kLog2;
}

double gauss_q(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double phi1(double gamma, double mu) {
  require_positive(mu, "phi1: mu");
  const double s = std::sqrt(mu);
  const double t = gamma / s;
  const double pdf = std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
  if (t >= -1.0) {
    return gamma * gauss_q(-t) + s * pdf;
  }
  // Both terms nearly cancel for gamma << 0; factor out the Gaussian density.
  const double u = -t;
  return s * pdf * (1.0 - u * std::sqrt(M_PI / 2.0) * erfcx(u * M_SQRT1_2));
}

double phi2(double gamma, double mu) {
  require_positive(mu, "phi2: mu");
  return gamma * phi1(gamma, mu) + mu * gauss_q(-gamma / std::sqrt(mu));
}

EdgeQuantities edge_quantities(double r_hat, double mu_r, double b) {
  require_positive(mu_r, "edge_quantities: mu_r");
  require_positive(b, "edge_quantities: b");
  EdgeQuantities e;
  e.alpha_minus = -r_hat / b - mu_r / (2.0 * b * b);
  e.alpha_plus = r_hat / b - mu_r / (2.0 * b * b);
  e.gamma_minus = r_hat + mu_r / b;
  e.gamma_plus = r_hat - mu_r / b;
  // psi = (1/4b) exp(-r^2/2mu) [erfcx(g-/sqrt(2mu)) + erfcx(-g+/sqrt(2mu))],
  // using exp(-a+-) Q(.) = (1/2) exp(-r^2/2mu) erfcx(.).
  const double inv = 1.0 / std::sqrt(2.0 * mu_r);
  const double log_sum = logsumexp2(log_erfcx(e.gamma_minus * inv),
                                    log_erfcx(-e.gamma_plus * inv));
  e.psi = 0.25 / b * std::exp(log_sum - r_hat * r_hat / (2.0 * mu_r));
  return e;
}

DenoiserStats laplace_posterior_stats(double r_hat, double mu_r,
                                      const LaplacePrior& prior) {
  require_positive(mu_r, "laplace_posterior_stats: mu_r");
  require_positive(prior.b, "laplace_posterior_stats: b");
  const double b = prior.b;
  // Work with |r_hat| and mirror the mean's sign afterwards; this makes the
  // even moments bitwise symmetric instead of symmetric up to branch rounding.
  const double sign = r_hat < 0.0 ? -1.0 : 1.0;
  const double r = std::abs(r_hat);
  const double ratio = mu_r / b;
  const double gm = r + ratio;  // gamma-
  const double gp = r - ratio;  // gamma+
  const double inv = 1.0 / std::sqrt(2.0 * mu_r);

  // Posterior is a two-piece weighted mixture with weights proportional to
  // E- = erfcx(gm/sqrt(2mu)) and E+ = erfcx(-gp/sqrt(2mu)); everything is
  // expressed through rho = E-/(E- + E+) and log(E- + E+).
  const double a_minus = gm * inv;
  const double a_plus = -gp * inv;
  const double log_em = log_erfcx(a_minus);
  const double log_ep = log_erfcx(a_plus);
  const double ell = log_em - log_ep;
  const double rho = 1.0 / (1.0 + std::exp(-ell));
  const double log_sum = logsumexp2(log_em, log_ep);

  // tanh(ell/2) = (E- - E+)/(E- + E+). When ratio >> r the mean loses the
  // leading digits of r to this term, and the O(eps) absolute rounding of the
  // two logs is then amplified by ratio. In that regime both erfcx arguments
  // are deep in the continued-fraction range, where the ratio of weights can
  // be formed exactly from the fraction tails:
  //   E-/E+ = (a_plus + K(a_plus)) / (a_minus + K(a_minus)),
  //   tanh(ell/2) = (-2 r inv + K(a_plus) - K(a_minus))
  //               / (a_minus + a_plus + K(a_minus) + K(a_plus)),
  // with the numerator's dominant term -2 r inv computed in one rounding.
  double tanh_half_ell;
  if (a_minus >= 8.0 && a_plus >= 8.0) {
    const double km = erfcx_cf_tail(a_minus);
    const double kp = erfcx_cf_tail(a_plus);
    tanh_half_ell =
        (-2.0 * r * inv + (kp - km)) / (a_minus + a_plus + km + kp);
  } else {
    tanh_half_ell = std::tanh(0.5 * ell);
  }

  DenoiserStats out;
  out.mean = sign * (r + ratio * tanh_half_ell);

  // Gaussian correction term of the second moment:
  // 4 mu^2 / (b sqrt(2 pi mu)) / (E- + E+).
  const double log_g = kLog2 + kLog2 + 1.5 * std::log(mu_r) - std::log(b) -
                       kHalfLog2Pi - log_sum;
  const double g = std::exp(log_g);
  const double spread = rho * (1.0 - rho) * (2.0 * ratio) * (2.0 * ratio);
  double var = mu_r + spread - g;
  var = std::clamp(var, std::numeric_limits<double>::min(), mu_r);
  out.variance = var;

  // abs_mean = (gamma+ E+ - gamma- E-)/(E- + E+) + 4 sqrt(mu/2pi)/(E- + E+).
  const double log_a =
      kLog2 + kLog2 + 0.5 * std::log(mu_r) - kHalfLog2Pi - log_sum;
  double abs_mean = (1.0 - rho) * gp - rho * gm + std::exp(log_a);
  out.abs_mean = std::max(abs_mean, std::abs(out.mean));

  if (std::isnan(out.mean) || std::isnan(out.variance) ||
      std::isnan(out.abs_mean)) {
    throw std::runtime_error("laplace_posterior_stats: NaN result");
  }
  return out;
}

}  // namespace mmce
