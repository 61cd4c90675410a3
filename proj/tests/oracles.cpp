#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace oracles {

namespace {

struct GslCallback {
  const std::function<double(double)>* f;
};

double gsl_thunk(double x, void* params) {
  return (*static_cast<GslCallback*>(params)->f)(x);
}

void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double epsabs, double epsrel) {
  disable_gsl_abort();
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4096);
  GslCallback cb{&f};
  gsl_function gf{&gsl_thunk, &cb};
  double result = 0.0, abserr = 0.0;
  const int status = gsl_integration_qag(&gf, a, b, epsabs, epsrel, 4096,
                                         GSL_INTEG_GAUSS61, ws, &result,
                                         &abserr);
  gsl_integration_workspace_free(ws);
  // Roundoff-limited accuracy is expected at the requested tolerances; any
  // other failure invalidates the oracle.
  if (status != GSL_SUCCESS && status != GSL_EROUND) {
    throw std::runtime_error("gsl quadrature failed: " +
                             std::string(gsl_strerror(status)));
  }
  return result;
}

PosteriorMoments laplace_moments(double r, double mu, double b) {
  const double sd = std::sqrt(mu);
  auto log_density = [&](double x) {
    return -std::abs(x) / b - (x - r) * (x - r) / (2.0 * mu);
  };
  const double mode_pos = std::max(0.0, r - mu / b);
  const double mode_neg = std::min(0.0, r + mu / b);
  const double log_peak = std::max(
      {log_density(0.0), log_density(mode_pos), log_density(mode_neg)});
  // Truncate only where the density has dropped by e^-46 from its peak;
  // fixed multiples of b or sd leave tails that bias the mean at the 1e-8
  // scale when b << sd.
  const double step = std::min(b, sd);
  double lo = std::min({0.0, r, mode_neg});
  while (log_density(lo) - log_peak > -46.0) lo -= step;
  double hi = std::max({0.0, r, mode_pos});
  while (log_density(hi) - log_peak > -46.0) hi += step;
  auto density = [&](double x) { return std::exp(log_density(x) - log_peak); };

  // Segment boundaries at the kink, the prior scale, the Gaussian peak, and
  // the two one-sided posterior modes. The modes matter: for mu/b >> |r| the
  // density is a boundary layer near r -+ mu/b, far from r itself.
  std::vector<double> pts = {lo, -4.0 * b, -b, 0.0, b, 4.0 * b, hi};
  for (double center : {r, mode_pos, mode_neg}) {
    for (double off : {-3.0 * sd, -sd, 0.0, sd, 3.0 * sd}) {
      pts.push_back(center + off);
    }
  }
  std::sort(pts.begin(), pts.end());
  auto moment = [&](const std::function<double(double)>& weight) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double a = std::clamp(pts[i], lo, hi);
      const double c = std::clamp(pts[i + 1], lo, hi);
      if (c > a) {
        total += integrate([&](double x) { return weight(x) * density(x); },
                           a, c);
      }
    }
    return total;
  };

  const double z = moment([](double) { return 1.0; });
  PosteriorMoments m;
  m.mean = moment([](double x) { return x; }) / z;
  m.abs_mean = moment([](double x) { return std::abs(x); }) / z;
  const double mean = m.mean;
  m.variance =
      moment([&](double x) { return (x - mean) * (x - mean); }) / z;
  // Undo the peak normalization and fold in the Gaussian normalizer.
  m.normalizer = z * std::exp(log_peak) / std::sqrt(2.0 * M_PI * mu);
  return m;
}

mmce::Mat dense_lifted(const mmce::CMat& b, mmce::Index m_r) {
  const mmce::Index m_t = b.rows();
  const mmce::Index k = b.cols();
  mmce::CMat a_tilde = mmce::CMat::Zero(k * m_r, m_t * m_r);
  // A~ = B^T kron I_mr, built entry by entry.
  for (mmce::Index i = 0; i < k; ++i) {
    for (mmce::Index j = 0; j < m_t; ++j) {
      for (mmce::Index d = 0; d < m_r; ++d) {
        a_tilde(i * m_r + d, j * m_r + d) = b(j, i);
      }
    }
  }
  const mmce::Index mm = a_tilde.rows();
  const mmce::Index nn = a_tilde.cols();
  mmce::Mat lifted(2 * mm, 2 * nn);
  lifted.topLeftCorner(mm, nn) = a_tilde.real();
  lifted.topRightCorner(mm, nn) = -a_tilde.imag();
  lifted.bottomLeftCorner(mm, nn) = a_tilde.imag();
  lifted.bottomRightCorner(mm, nn) = a_tilde.real();
  return lifted;
}

void QuadratureLaplaceDenoiser::denoise(double r_hat, double mu_r,
                                        double& mean, double& variance,
                                        double* abs_mean) const {
  const PosteriorMoments m = laplace_moments(r_hat, mu_r, b_);
  mean = m.mean;
  variance = m.variance;
  if (abs_mean) *abs_mean = m.abs_mean;
}

}  // namespace oracles
