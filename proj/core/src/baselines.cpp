#include "mmce/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "mmce/laplace.hpp"

namespace mmce {

Vec conjugate_gradient(const std::function<Vec(const Vec&)>& apply,
                       const Vec& rhs, const CgOptions& opts,
                       int* iterations) {
  const Index n = rhs.size();
  const int cap = opts.max_iterations > 0 ? opts.max_iterations
                                          : static_cast<int>(10 * n);
  Vec x = Vec::Zero(n);
  Vec r = rhs;
  Vec p = r;
  double rr = r.squaredNorm();
  const double target = opts.tolerance * opts.tolerance * rhs.squaredNorm();
  int it = 0;
  while (rr > target && it < cap) {
    Vec ap = apply(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) {
      throw std::runtime_error("conjugate_gradient: operator not SPD");
    }
    const double alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    ++it;
  }
  if (iterations) *iterations = it;
  if (rr > target) {
    throw std::runtime_error("conjugate_gradient: no convergence within cap");
  }
  return x;
}

BaselineEstimate ls_estimate(const LinearOperator& op, const Vec& y,
                             const CgOptions& opts) {
  if (op.rows() < op.cols()) {
    throw std::runtime_error("ls_estimate: underdetermined system (M < N)");
  }
  auto normal = [&op](const Vec& v) { return op.apply_adjoint(op.apply(v)); };
  BaselineEstimate est;
  est.method = "ls";
  est.x_hat = conjugate_gradient(normal, op.apply_adjoint(y), opts,
                                 &est.cg_iterations);
  return est;
}

BaselineEstimate lmmse_estimate(const LinearOperator& op, const Vec& y,
                                double sigma2_w, double prior_var,
                                const CgOptions& opts) {
  if (!(sigma2_w > 0.0) || !(prior_var > 0.0)) {
    throw std::domain_error("lmmse_estimate: variances must be > 0");
  }
  auto gram = [&](const Vec& v) -> Vec {
    return prior_var * op.apply(op.apply_adjoint(v)) + sigma2_w * v;
  };
  BaselineEstimate est;
  est.method = "lmmse";
  Vec dual = conjugate_gradient(gram, y, opts, &est.cg_iterations);
  est.x_hat = prior_var * op.apply_adjoint(dual);
  return est;
}

void gaussian_posterior_stats(double r_hat, double mu_r, double prior_var,
                              double& mean, double& variance) {
  if (!(mu_r > 0.0) || !(prior_var > 0.0)) {
    throw std::domain_error("gaussian_posterior_stats: variances must be > 0");
  }
  const double denom = prior_var + mu_r;
  mean = prior_var * r_hat / denom;
  variance = prior_var * mu_r / denom;
}

void GaussianDenoiser::denoise(double r_hat, double mu_r, double& mean,
                               double& variance, double* abs_mean) const {
  gaussian_posterior_stats(r_hat, mu_r, var_, mean, variance);
  if (abs_mean) {
    // Folded-normal first moment of the posterior.
    const double sd = std::sqrt(variance);
    *abs_mean = sd * std::sqrt(2.0 / M_PI) *
                    std::exp(-mean * mean / (2.0 * variance)) +
                mean * std::erf(mean / (sd * M_SQRT2));
  }
}

void LaplaceDenoiser::denoise(double r_hat, double mu_r, double& mean,
                              double& variance, double* abs_mean) const {
  const DenoiserStats stats =
      laplace_posterior_stats(r_hat, mu_r, LaplacePrior{b_});
  mean = stats.mean;
  variance = stats.variance;
  if (abs_mean) *abs_mean = stats.abs_mean;
}

}  // namespace mmce
