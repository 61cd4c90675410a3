#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <vector>

#include <CLI11.hpp>

#include "mmce/baselines.hpp"
#include "mmce/channel.hpp"
#include "mmce/evaluate.hpp"
#include "mmce/experiment.hpp"
#include "mmce/laplace.hpp"

#include "quadrature.hpp"

namespace {

using namespace mmce;

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::uint64_t seed, bool seed_set, int threads, int trials) {
  ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      config = parse_config(config_path);
    }
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed_set) config.master_seed = seed;
    if (threads >= 0) config.threads = threads;
    if (trials > 0) config.n_trials = trials;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  try {
    ExperimentOutput out = run_experiment(config);
    std::cout << "wrote " << out.trials_csv << "\n"
              << "wrote " << out.aggregate_csv << "\n"
              << "wrote " << out.manifest_json << "\n";
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

// Quadrature reference for the Laplace posterior moments.
void quad_posterior(double r, double mu, double b, double& mean, double& var,
                    double& abs_mean) {
  const double sd = std::sqrt(mu);
  auto log_density = [&](double x) {
    return -std::abs(x) / b - (x - r) * (x - r) / (2.0 * mu);
  };
  // Normalize by the peak so the absolute-tolerance rule sees O(1) values.
  const double mode_pos = std::max(0.0, r - mu / b);
  const double mode_neg = std::min(0.0, r + mu / b);
  const double log_peak =
      std::max({log_density(0.0), log_density(mode_pos), log_density(mode_neg)});
  // Truncate only once the density is e^-46 below the peak; fixed multiples
  // of b or sd can clip a tail that still biases the mean.
  const double step = std::min(b, sd);
  double lo = std::min({0.0, r, mode_neg});
  while (log_density(lo) - log_peak > -46.0) lo -= step;
  double hi = std::max({0.0, r, mode_pos});
  while (log_density(hi) - log_peak > -46.0) hi += step;
  auto density = [&](double x) { return std::exp(log_density(x) - log_peak); };
  // Breakpoints at the prior kink, the prior scale, the Gaussian peak, and
  // the one-sided posterior modes so the adaptive rule never misses a narrow
  // boundary layer.
  std::vector<double> pts = {lo, -4.0 * b, -b, 0.0, b, 4.0 * b, hi};
  for (double center : {r, mode_pos, mode_neg}) {
    for (double off : {-3.0 * sd, -sd, 0.0, sd, 3.0 * sd}) {
      pts.push_back(center + off);
    }
  }
  std::sort(pts.begin(), pts.end());
  auto moment = [&](auto weight) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double a = std::clamp(pts[i], lo, hi);
      const double c = std::clamp(pts[i + 1], lo, hi);
      if (c > a) {
        total += mmce_tools::integrate(
            [&](double x) { return weight(x) * density(x); }, a, c);
      }
    }
    return total;
  };
  const double z = moment([](double) { return 1.0; });
  mean = moment([](double x) { return x; }) / z;
  abs_mean = moment([](double x) { return std::abs(x); }) / z;
  var = moment([&](double x) { return (x - mean) * (x - mean); }) / z;
}

int cmd_denoise_check() {
  std::printf("%12s %12s %12s %14s %14s %14s %10s %10s %10s\n", "r_hat", "mu_r",
              "b", "mean", "variance", "abs_mean", "err_mean", "err_var",
              "err_abs");
  double worst = 0.0;
  for (double b : {0.1, 1.0, 10.0}) {
    for (double mu : {0.01, 0.1, 1.0, 10.0}) {
      for (double r : {-5.0, -2.0, -0.5, 0.5, 2.0, 5.0}) {
        const DenoiserStats s = laplace_posterior_stats(r, mu, LaplacePrior{b});
        double qm, qv, qa;
        quad_posterior(r, mu, b, qm, qv, qa);
        const double em = std::abs(s.mean - qm) / std::max(std::abs(qm), 1e-300);
        const double ev = std::abs(s.variance - qv) / mu;
        const double ea = std::abs(s.abs_mean - qa) / std::abs(qa);
        worst = std::max({worst, em, ev, ea});
        std::printf("%12.4g %12.4g %12.4g %14.8g %14.8g %14.8g %10.2e %10.2e %10.2e\n",
                    r, mu, b, s.mean, s.variance, s.abs_mean, em, ev, ea);
      }
    }
  }
  std::printf("worst relative error: %.3e\n", worst);
  return worst < 1e-8 ? 0 : 2;
}

bool report(const char* name, bool ok) {
  std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
  return ok;
}

int cmd_selftest() {
  bool ok = true;
  Rng rng(7);

  {  // Adjoint identity on the lifted Kronecker operator.
    PilotMatrix pilots = generate_pilots(rng, 8, 6);
    LinearOperator op = LinearOperator::real_lifted_kron(pilots.B, 4);
    std::normal_distribution<double> gauss;
    bool pass = true;
    for (int i = 0; i < 100; ++i) {
      Vec v(op.cols()), u(op.rows());
      for (auto& x : v) x = gauss(rng);
      for (auto& x : u) x = gauss(rng);
      const double lhs = op.apply(v).dot(u);
      const double rhs = v.dot(op.apply_adjoint(u));
      pass = pass && std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs);
    }
    ok &= report("operator adjoint identity", pass);
  }

  {  // Frobenius consistency.
    PilotMatrix pilots = generate_pilots(rng, 16, 12);
    LinearOperator op = LinearOperator::real_lifted_kron(pilots.B, 8);
    const double fro = op.apply_abs2(Vec::Ones(op.cols())).sum();
    ok &= report("operator Frobenius consistency",
                 std::abs(fro - op.frobenius_sq()) < 1e-9 * fro);
  }

  {  // Edge-quantity algebraic identity.
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    bool pass = true;
    for (int i = 0; i < 1000; ++i) {
      const double r = uni(rng);
      const double mu = std::exp(uni(rng) * 0.5);
      const double b = std::exp(uni(rng) * 0.5);
      const EdgeQuantities e = edge_quantities(r, mu, b);
      const double ref = r * r / (2.0 * mu);
      const double lhs = e.alpha_plus + e.gamma_plus * e.gamma_plus / (2.0 * mu);
      const double rhs =
          e.alpha_minus + e.gamma_minus * e.gamma_minus / (2.0 * mu);
      const double scale = std::max(1.0, std::abs(ref));
      pass = pass && std::abs(lhs - ref) <= 1e-10 * scale &&
             std::abs(rhs - ref) <= 1e-10 * scale;
    }
    ok &= report("edge-quantity identity", pass);
  }

  {  // GAMP with Gaussian prior reaches the LMMSE solution.
    std::normal_distribution<double> gauss;
    Mat a(48, 24);
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) a(i, j) = gauss(rng) / std::sqrt(48.0);
    }
    LinearOperator op = LinearOperator::dense(a);
    Vec x(24);
    for (auto& v : x) v = gauss(rng);
    Vec y = op.apply(x);
    for (auto& v : y) v += 0.1 * gauss(rng);
    GampConfig cfg;
    cfg.tolerance = 1e-14;
    cfg.max_iterations = 400;
    cfg.damping = 0.7;
    GaussianDenoiser denoiser(1.0);
    GampResult res = run_gamp(op, y, denoiser, 0.01, cfg);
    BaselineEstimate lmmse = lmmse_estimate(op, y, 0.01, 1.0);
    const double rel = (res.x_hat - lmmse.x_hat).norm() / lmmse.x_hat.norm();
    ok &= report("gamp-gaussian matches lmmse", rel < 1e-6);
  }

  {  // Determinism of the Monte-Carlo harness across thread counts.
    Scenario sc;
    sc.m_t = sc.m_r = 8;
    sc.k = 8;
    sc.clusters = 2;
    sc.subpaths = 3;
    sc.snr_db = 10.0;
    auto a = run_monte_carlo(sc, {"gamp_laplace"}, 6, 99, 1);
    auto b = run_monte_carlo(sc, {"gamp_laplace"}, 6, 99, 3);
    bool pass = a.size() == b.size();
    for (std::size_t i = 0; pass && i < a.size(); ++i) {
      pass = a[i].nmse == b[i].nmse && a[i].iterations == b[i].iterations;
    }
    ok &= report("monte-carlo thread determinism", pass);
  }

  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave angular-domain channel estimation experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = -1, trials = 0;

  CLI::App* run = app.add_subcommand("run", "run a Monte-Carlo experiment");
  run->add_option("--config", config_path, "JSON config path");
  run->add_option("--out", out_dir, "output directory (overrides config)");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "master seed (overrides config)");
  run->add_option("--threads", threads, "worker threads (0 = all cores)");
  run->add_option("--trials", trials, "trial count (overrides config)");

  CLI::App* denoise = app.add_subcommand(
      "denoise-check", "compare the closed-form denoiser with quadrature");
  CLI::App* selftest =
      app.add_subcommand("selftest", "run the built-in invariant suite");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(run)) {
    return cmd_run(config_path, out_dir, seed, seed_opt->count() > 0, threads,
                   trials);
  }
  if (app.got_subcommand(denoise)) return cmd_denoise_check();
  if (app.got_subcommand(selftest)) return cmd_selftest();
  return 1;
}
