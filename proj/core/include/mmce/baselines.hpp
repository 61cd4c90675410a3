#pragma once

#include <functional>
#include <string>

#include "mmce/gamp.hpp"
#include "mmce/linear_operator.hpp"
#include "mmce/types.hpp"

namespace mmce {

struct BaselineEstimate {
  Vec x_hat;
  std::string method;
  int cg_iterations = 0;
};

struct CgOptions {
  double tolerance = 1e-10;  // relative residual
  int max_iterations = 0;    // 0 = 10 * dimension
};

/// Conjugate gradient on a symmetric positive definite operator given as a
/// matrix-vector product. Throws std::runtime_error on non-convergence.
Vec conjugate_gradient(const std::function<Vec(const Vec&)>& apply,
                       const Vec& rhs, const CgOptions& opts,
                       int* iterations = nullptr);

/// Least-squares x = (A^T A)^-1 A^T y via CG on the normal equations.
/// Requires M >= N; rank deficiency surfaces as CG non-convergence.
BaselineEstimate ls_estimate(const LinearOperator& op, const Vec& y,
                             const CgOptions& opts = {});

/// LMMSE x = v A^T (v A A^T + sigma2 I)^-1 y with white prior variance v.
BaselineEstimate lmmse_estimate(const LinearOperator& op, const Vec& y,
                                double sigma2_w, double prior_var,
                                const CgOptions& opts = {});

/// Gaussian x N(0, v) posterior under the message N(r_hat, mu_r).
void gaussian_posterior_stats(double r_hat, double mu_r, double prior_var,
                              double& mean, double& variance);

/// Gaussian-prior input denoiser, used to cross-validate the GAMP engine
/// against LMMSE.
class GaussianDenoiser final : public InputDenoiser {
 public:
  explicit GaussianDenoiser(double prior_var) : var_(prior_var) {}

  double prior_mean() const override { return 0.0; }
  double prior_variance() const override { return var_; }
  void denoise(double r_hat, double mu_r, double& mean, double& variance,
               double* abs_mean) const override;

 private:
  double var_;
};

/// Laplace-prior input denoiser backing the paper-facing estimator. The
/// scale is mutable so an EM hook can refine it between iterations.
class LaplaceDenoiser final : public InputDenoiser {
 public:
  explicit LaplaceDenoiser(double b) : b_(b) {}

  double prior_mean() const override { return 0.0; }
  double prior_variance() const override { return 2.0 * b_ * b_; }
  void denoise(double r_hat, double mu_r, double& mean, double& variance,
               double* abs_mean) const override;

  double scale() const { return b_; }
  void set_scale(double b) { b_ = b; }

 private:
  double b_;
};

}  // namespace mmce
