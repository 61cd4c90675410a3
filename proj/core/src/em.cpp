#include "mmce/em.hpp"

#include <cmath>
#include <stdexcept>

#include "mmce/laplace.hpp"

namespace mmce {

EmState init_hyperparams(const Vec& y, const EmConfig& config) {
  if (y.size() < 1) throw std::invalid_argument("init_hyperparams: empty y");
  const double m = static_cast<double>(y.size());
  double sigma2 = y.squaredNorm() / ((config.snr_init + 1.0) * m);
  sigma2 = std::max(sigma2, config.sigma2_floor);
  return EmState{config.b_init, sigma2, 0};
}

double update_scale(const Vec& r_hat, const Vec& mu_r, double b) {
  if (r_hat.size() != mu_r.size() || r_hat.size() < 1) {
    throw std::invalid_argument("update_scale: length mismatch");
  }
  if (!(b > 0.0)) throw std::domain_error("update_scale: b must be > 0");
  const LaplacePrior prior{b};
  double sum = 0.0;
  for (Index i = 0; i < r_hat.size(); ++i) {
    sum += laplace_posterior_stats(r_hat[i], mu_r[i], prior).abs_mean;
  }
  return sum / static_cast<double>(r_hat.size());
}

double update_noise_variance(const Vec& y, const Vec& z_hat, const Vec& mu_z) {
  if (y.size() != z_hat.size() || y.size() != mu_z.size() || y.size() < 1) {
    throw std::invalid_argument("update_noise_variance: length mismatch");
  }
  return ((y - z_hat).squaredNorm() + mu_z.sum()) /
         static_cast<double>(y.size());
}

EmState em_step(const EmState& state, const Vec& r_hat, const Vec& mu_r,
                const Vec& z_hat, const Vec& mu_z, const Vec& y,
                const EmConfig& config) {
  EmState next = state;
  for (int i = 0; i < config.max_inner_iters; ++i) {
    const double b_new = std::max(update_scale(r_hat, mu_r, next.b),
                                  config.b_floor);
    const bool settled = std::abs(b_new - next.b) <= config.tolerance * next.b;
    next.b = b_new;
    if (settled) break;
  }
  next.sigma2_w = std::max(update_noise_variance(y, z_hat, mu_z),
                           config.sigma2_floor);
  next.iteration = state.iteration + 1;
  return next;
}

}  // namespace mmce
