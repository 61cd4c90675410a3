#include "mmce/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include <Eigen/SVD>

#include "mmce/baselines.hpp"
#include "mmce/channel.hpp"
#include "mmce/laplace.hpp"

namespace mmce {

double nmse(const Vec& x_hat, const Vec& x_true) {
  if (x_hat.size() != x_true.size()) {
    throw std::invalid_argument("nmse: length mismatch");
  }
  const double ref = x_true.squaredNorm();
  if (ref == 0.0) throw std::domain_error("nmse: zero reference vector");
  return (x_hat - x_true).squaredNorm() / ref;
}

WaterfillResult waterfill(const Vec& singular_values, double noise_var,
                          double total_power) {
  const Index n = singular_values.size();
  if (!(total_power > 0.0)) {
    throw std::domain_error("waterfill: total_power must be > 0");
  }
  for (Index i = 0; i + 1 < n; ++i) {
    if (singular_values[i] < singular_values[i + 1]) {
      throw std::invalid_argument("waterfill: gains must be sorted descending");
    }
  }
  if (n == 0 || !(singular_values[0] > 0.0)) {
    throw std::domain_error("waterfill: degenerate channel, all gains zero");
  }

  // Inverse gains n_i = noise / sigma_i^2 (ascending); infinite for zero
  // singular values, which can never be active.
  Vec inv(n);
  for (Index i = 0; i < n; ++i) {
    inv[i] = singular_values[i] > 0.0
                 ? noise_var / (singular_values[i] * singular_values[i])
                 : std::numeric_limits<double>::infinity();
  }

  // Exact active-set solve: with k active streams the level is
  // (P + sum_{i<k} n_i) / k; k is the largest count keeping all levels above
  // their inverse gains.
  WaterfillResult res;
  res.powers = Vec::Zero(n);
  double cum = 0.0;
  double level = 0.0;
  int active = 0;
  for (Index kk = 1; kk <= n; ++kk) {
    if (std::isinf(inv[kk - 1])) break;
    const double candidate = (total_power + cum + inv[kk - 1]) / kk;
    if (candidate <= inv[kk - 1]) break;
    cum += inv[kk - 1];
    level = (total_power + cum) / kk;
    active = static_cast<int>(kk);
  }
  for (int i = 0; i < active; ++i) {
    res.powers[i] = level - inv[i];
  }
  res.level = level;
  res.active_streams = active;
  return res;
}

RateReport rate_lower_bound(const CMat& h_true, const CMat& h_hat,
                            double sigma2_w, double total_power) {
  if (h_true.rows() != h_hat.rows() || h_true.cols() != h_hat.cols()) {
    throw std::invalid_argument("rate_lower_bound: shape mismatch");
  }
  if (!(sigma2_w > 0.0)) {
    throw std::domain_error("rate_lower_bound: sigma2_w must be > 0");
  }
  Eigen::JacobiSVD<CMat> svd(h_hat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vec sigma = svd.singularValues();
  // Numerical-rank cutoff so a rank-deficient estimate does not spawn
  // spurious tiny streams.
  const double cutoff = 1e-10 * sigma[0];
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] < cutoff) sigma[i] = 0.0;
  }
  const double noise = 2.0 * sigma2_w;  // complex noise variance
  WaterfillResult wf = waterfill(sigma, noise, total_power);

  const Index streams = sigma.size();
  CMat gains = svd.matrixU().adjoint() * h_true * svd.matrixV();
  RateReport report;
  report.powers = wf.powers;
  report.sinr = Vec::Zero(streams);
  report.active_streams = wf.active_streams;
  for (Index m = 0; m < streams; ++m) {
    if (wf.powers[m] == 0.0) continue;
    double interference = 0.0;
    for (Index j = 0; j < streams; ++j) {
      if (j != m) interference += wf.powers[j] * std::norm(gains(m, j));
    }
    report.sinr[m] = wf.powers[m] * std::norm(gains(m, m)) /
                     (noise + interference);
    report.rate_bits += std::log2(1.0 + report.sinr[m]);
  }
  return report;
}

double Scenario::sigma2_w() const {
  return 1.0 / (2.0 * std::pow(10.0, snr_db / 10.0));
}

bool is_known_estimator(const std::string& name) {
  for (const char* known : kEstimatorNames) {
    if (name == known) return true;
  }
  return false;
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial) {
  // splitmix64 over master ^ trial index; decorrelates neighboring trials.
  std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL *
                                      (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct TrialData {
  ChannelRealization channel;
  RealLiftedProblem problem;
};

TrialData make_trial(const Scenario& sc, std::uint64_t seed) {
  Rng rng(seed);
  ClusterGeometry geo = sample_cluster_geometry(rng, sc.clusters, sc.subpaths,
                                                sc.spread_deg);
  ChannelRealization ch = synthesize_channel(geo, sc.m_r, sc.m_t, rng);
  PilotMatrix pilots = generate_pilots(rng, sc.m_t, sc.k);
  RealLiftedProblem prob =
      synthesize_problem(ch, pilots, sc.sigma2_w(), rng);
  return TrialData{std::move(ch), std::move(prob)};
}

TrialRecord run_estimator(const Scenario& sc, const std::string& name,
                          const TrialData& data, int trial) {
  TrialRecord rec;
  rec.trial = trial;
  rec.estimator = name;
  rec.snr_db = sc.snr_db;
  rec.k = sc.k;

  const RealLiftedProblem& prob = data.problem;
  const auto t0 = std::chrono::steady_clock::now();
  Vec x_hat = Vec::Zero(prob.x_true.size());
  try {
    if (name == "gamp_laplace") {
      EmState em = init_hyperparams(prob.y, sc.em);
      LaplaceDenoiser denoiser(em.b);
      EmConfig em_cfg = sc.em;
      auto hook = [&](const Vec& r_hat, const Vec& mu_r, const Vec& z_hat,
                      const Vec& mu_z, const Vec& y, double& sigma2) {
        em = em_step(em, r_hat, mu_r, z_hat, mu_z, y, em_cfg);
        denoiser.set_scale(em.b);
        sigma2 = em.sigma2_w;
      };
      GampResult res =
          run_gamp(prob.A, prob.y, denoiser, em.sigma2_w, sc.gamp, hook);
      x_hat = res.x_hat;
      rec.iterations = res.iterations;
      rec.converged = res.converged();
      rec.b_hat = denoiser.scale();
      rec.sigma2_hat = res.sigma2_w;
    } else if (name == "gamp_gaussian") {
      GaussianDenoiser denoiser(sc.gaussian_prior_var);
      GampResult res =
          run_gamp(prob.A, prob.y, denoiser, prob.sigma2_w, sc.gamp);
      x_hat = res.x_hat;
      rec.iterations = res.iterations;
      rec.converged = res.converged();
    } else if (name == "ls") {
      BaselineEstimate est = ls_estimate(prob.A, prob.y);
      x_hat = est.x_hat;
      rec.iterations = est.cg_iterations;
      rec.converged = true;
    } else if (name == "lmmse") {
      BaselineEstimate est =
          lmmse_estimate(prob.A, prob.y, prob.sigma2_w, sc.lmmse_prior_var);
      x_hat = est.x_hat;
      rec.iterations = est.cg_iterations;
      rec.converged = true;
    } else if (name == "perfect_csi") {
      x_hat = prob.x_true;
      rec.converged = true;
    } else {
      throw std::invalid_argument("unknown estimator: " + name);
    }
  } catch (const std::exception&) {
    // Estimator failure: scored as the zero estimate, flagged not converged.
    x_hat.setZero();
    rec.converged = false;
  }

  rec.nmse = nmse(x_hat, prob.x_true);
  if (sc.rate_eval) {
    CMat h_hat_ang = unlift_real(x_hat, prob.m_r, prob.m_t);
    rec.rate_bits =
        rate_lower_bound(data.channel.H, from_angular(h_hat_ang),
                         prob.sigma2_w, sc.total_power)
            .rate_bits;
  }
  const auto t1 = std::chrono::steady_clock::now();
  rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_monte_carlo(const Scenario& scenario,
                                         const std::vector<std::string>& estimators,
                                         int n_trials,
                                         std::uint64_t master_seed,
                                         int threads) {
  if (n_trials < 1) throw std::invalid_argument("run_monte_carlo: n_trials < 1");
  for (const auto& e : estimators) {
    if (!is_known_estimator(e)) {
      throw std::invalid_argument("run_monte_carlo: unknown estimator " + e);
    }
  }
  const int n_est = static_cast<int>(estimators.size());
  std::vector<TrialRecord> records(
      static_cast<std::size_t>(n_trials) * n_est);

  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n_trials);

  auto worker = [&](int first, int step) {
    for (int trial = first; trial < n_trials; trial += step) {
      TrialData data = make_trial(scenario, trial_seed(master_seed, trial));
      for (int e = 0; e < n_est; ++e) {
        records[static_cast<std::size_t>(trial) * n_est + e] =
            run_estimator(scenario, estimators[e], data, trial);
      }
    }
  };

  if (workers == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(worker, w, workers);
    }
    for (auto& th : pool) th.join();
  }
  return records;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records) {
  std::map<std::tuple<std::string, double, Index>, std::vector<const TrialRecord*>>
      groups;
  for (const auto& rec : records) {
    groups[{rec.estimator, rec.snr_db, rec.k}].push_back(&rec);
  }
  std::vector<AggregateRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, recs] : groups) {
    AggregateRow row;
    row.estimator = std::get<0>(key);
    row.snr_db = std::get<1>(key);
    row.k = std::get<2>(key);
    row.trials = static_cast<int>(recs.size());
    double sum = 0, sum_sq = 0, iters = 0, conv = 0, rate = 0, wall = 0;
    for (const auto* r : recs) {
      sum += r->nmse;
      sum_sq += r->nmse * r->nmse;
      iters += r->iterations;
      conv += r->converged ? 1.0 : 0.0;
      rate += r->rate_bits;
      wall += r->wall_ms;
    }
    const double n = row.trials;
    row.mean_nmse = sum / n;
    row.std_nmse = std::sqrt(std::max(0.0, sum_sq / n - row.mean_nmse * row.mean_nmse));
    row.mean_iterations = iters / n;
    row.converged_fraction = conv / n;
    row.mean_rate_bits = rate / n;
    row.mean_wall_ms = wall / n;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mmce
