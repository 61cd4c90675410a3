#include "mmce/gamp.hpp"

#include <cmath>
#include <stdexcept>

namespace mmce {

namespace {

bool all_finite(const Vec& v) { return v.allFinite(); }

void floor_in_place(Vec& v, double floor) {
  v = v.cwiseMax(floor);
}

void uniformize(Vec& v) { v.setConstant(v.mean()); }

}  // namespace

void awgn_output_stats(double p_hat, double mu_p, double y, double sigma2_w,
                       double& z_hat, double& mu_z) {
  if (!(mu_p > 0.0) || !(sigma2_w > 0.0)) {
    throw std::domain_error("awgn_output_stats: variances must be > 0");
  }
  const double denom = mu_p + sigma2_w;
  z_hat = (mu_p * y + sigma2_w * p_hat) / denom;
  mu_z = mu_p * sigma2_w / denom;
}

bool check_stop(const Vec& x_new, const Vec& x_old, double tolerance) {
  if (x_new.size() != x_old.size()) {
    throw std::invalid_argument("check_stop: length mismatch");
  }
  const double ref = x_old.squaredNorm();
  if (ref == 0.0) return x_new.squaredNorm() == 0.0;
  return (x_new - x_old).squaredNorm() <= tolerance * ref;
}

GampResult run_gamp(const LinearOperator& op, const Vec& y,
                    const InputDenoiser& denoiser, double sigma2_w,
                    const GampConfig& config, const EmHook& em_hook) {
  const Index m = op.rows();
  const Index n = op.cols();
  if (y.size() != m) {
    throw std::invalid_argument("run_gamp: y length does not match operator");
  }
  if (!(sigma2_w > 0.0)) {
    throw std::domain_error("run_gamp: sigma2_w must be > 0");
  }

  const double floor = config.variance_floor;
  const double damp = config.damping;

  GampResult res;
  res.x_hat = Vec::Constant(n, denoiser.prior_mean());
  res.mu_x = Vec::Constant(n, std::max(denoiser.prior_variance(), floor));
  res.sigma2_w = sigma2_w;
  Vec s_hat = Vec::Zero(m);
  Vec mu_s(m), p_hat(m);
  res.z_hat.resize(m);
  res.mu_z.resize(m);
  res.r_hat.resize(n);
  res.mu_r.resize(n);

  for (int t = 1; t <= config.max_iterations; ++t) {
    res.iterations = t;

    Vec mu_p = op.apply_abs2(res.mu_x);
    floor_in_place(mu_p, floor);
    if (config.uniform_variance) uniformize(mu_p);
    p_hat = op.apply(res.x_hat) - mu_p.cwiseProduct(s_hat);
    if (!all_finite(mu_p) || !all_finite(p_hat)) {
      res.status = GampStatus::Diverged;
      return res;
    }

    for (Index i = 0; i < m; ++i) {
      awgn_output_stats(p_hat[i], mu_p[i], y[i], res.sigma2_w, res.z_hat[i],
                        res.mu_z[i]);
    }

    // mu_s can go slightly negative in finite precision when mu_z ~ mu_p.
    mu_s = ((Vec::Ones(m) - res.mu_z.cwiseQuotient(mu_p)).cwiseQuotient(mu_p))
               .cwiseMax(0.0);
    Vec s_new = (res.z_hat - p_hat).cwiseQuotient(mu_p);
    s_hat = damp * s_new + (1.0 - damp) * s_hat;

    Vec mu_r_denom = op.apply_abs2_adjoint(mu_s);
    floor_in_place(mu_r_denom, floor);
    res.mu_r = mu_r_denom.cwiseInverse();
    if (config.uniform_variance) uniformize(res.mu_r);
    res.r_hat = res.x_hat + res.mu_r.cwiseProduct(op.apply_adjoint(s_hat));

    Vec x_new(n), mu_x_new(n);
    for (Index i = 0; i < n; ++i) {
      denoiser.denoise(res.r_hat[i], res.mu_r[i], x_new[i], mu_x_new[i],
                       nullptr);
    }
    floor_in_place(mu_x_new, floor);
    x_new = damp * x_new + (1.0 - damp) * res.x_hat;

    if (!all_finite(x_new) || !all_finite(mu_x_new) || !all_finite(s_hat)) {
      res.status = GampStatus::Diverged;
      return res;
    }

    if (em_hook) {
      em_hook(res.r_hat, res.mu_r, res.z_hat, res.mu_z, y, res.sigma2_w);
    }

    const bool stop = check_stop(x_new, res.x_hat, config.tolerance);
    res.x_hat = std::move(x_new);
    res.mu_x = std::move(mu_x_new);
    if (stop) {
      res.status = GampStatus::Converged;
      return res;
    }
  }
  res.status = GampStatus::MaxIterations;
  return res;
}

}  // namespace mmce
