#pragma once

#include <functional>

#include "mmce/linear_operator.hpp"
#include "mmce/types.hpp"

namespace mmce {

struct GampConfig {
  double tolerance = 1e-6;  // relative stopping tolerance on x_hat
  int max_iterations = 50;
  double damping = 1.0;  // applied to x_hat and s_hat; 1.0 = none
  double variance_floor = 1e-12;
  bool uniform_variance = false;  // replace per-component variances by means

  bool operator==(const GampConfig&) const = default;
};

/// Scalar input denoiser: posterior statistics of x given the Gaussian
/// message N(r_hat, mu_r) and the prior.
class InputDenoiser {
 public:
  virtual ~InputDenoiser() = default;

  virtual double prior_mean() const = 0;
  virtual double prior_variance() const = 0;
  /// Fills mean and variance; abs_mean may be left untouched by denoisers
  /// that do not support EM scale learning.
  virtual void denoise(double r_hat, double mu_r, double& mean,
                       double& variance, double* abs_mean) const = 0;
};

/// Per-iteration hook, invoked after the denoiser update with the current
/// iteration's posterior quantities. Used to couple EM hyperparameter
/// learning to the GAMP loop; it may mutate the denoiser's hyperparameters
/// and the noise variance for the next iteration.
using EmHook = std::function<void(const Vec& r_hat, const Vec& mu_r,
                                  const Vec& z_hat, const Vec& mu_z,
                                  const Vec& y, double& sigma2_w)>;

enum class GampStatus { Converged, MaxIterations, Diverged };

struct GampResult {
  Vec x_hat;
  Vec mu_x;
  Vec r_hat;
  Vec mu_r;
  Vec z_hat;
  Vec mu_z;
  int iterations = 0;
  GampStatus status = GampStatus::MaxIterations;
  double sigma2_w = 0.0;  // final (possibly EM-updated) noise variance

  bool converged() const { return status == GampStatus::Converged; }
};

/// AWGN output channel posterior: the product of N(z; p_hat, mu_p) and the
/// likelihood N(y; z, sigma2_w) in closed form.
void awgn_output_stats(double p_hat, double mu_p, double y, double sigma2_w,
                       double& z_hat, double& mu_z);

/// Relative-change stopping rule: ||x_new - x_old||^2 <= eps ||x_old||^2.
/// A zero x_old counts as converged only if x_new is zero too.
bool check_stop(const Vec& x_new, const Vec& x_old, double tolerance);

/// Runs sum-product GAMP on y = A x + w with the given input denoiser and
/// AWGN output channel. Throws std::invalid_argument on dimension mismatch;
/// divergence (NaN/Inf iterates) is reported through the result status with
/// the last finite state retained.
GampResult run_gamp(const LinearOperator& op, const Vec& y,
                    const InputDenoiser& denoiser, double sigma2_w,
                    const GampConfig& config = {}, const EmHook& em_hook = {});

}  // namespace mmce
