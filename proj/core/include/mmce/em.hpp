#pragma once

#include "mmce/types.hpp"

namespace mmce {

struct EmConfig {
  double tolerance = 1e-4;    // relative per-parameter stopping tolerance
  int max_inner_iters = 1;    // scale-update repetitions per GAMP iteration
  double snr_init = 100.0;    // SNR^0 guess used for the noise-variance init
  double b_init = 1.0;
  double b_floor = 1e-8;
  double sigma2_floor = 1e-12;

  bool operator==(const EmConfig&) const = default;
};

struct EmState {
  double b;
  double sigma2_w;
  int iteration = 0;
};

/// sigma2_0 = ||y||^2 / ((SNR^0 + 1) M), b_0 from the config.
EmState init_hyperparams(const Vec& y, const EmConfig& config = {});

/// EM update of the Laplace scale: the average posterior absolute first
/// moment (1/N) sum_n E{|x_n| | y} under the current scale b.
double update_scale(const Vec& r_hat, const Vec& mu_r, double b);

/// EM update of the noise variance: (1/M) sum_m ((y_m - z_hat_m)^2 + mu_z_m).
double update_noise_variance(const Vec& y, const Vec& z_hat, const Vec& mu_z);

/// One E/M sweep: repeats the scale update up to max_inner_iters times
/// (stopping early on relative change <= tolerance), then updates the noise
/// variance once. Both parameters are floored.
EmState em_step(const EmState& state, const Vec& r_hat, const Vec& mu_r,
                const Vec& z_hat, const Vec& mu_z, const Vec& y,
                const EmConfig& config = {});

}  // namespace mmce
