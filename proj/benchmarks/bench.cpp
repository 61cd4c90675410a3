#include <benchmark/benchmark.h>

#include <random>

#include "mmce/baselines.hpp"
#include "mmce/channel.hpp"
#include "mmce/gamp.hpp"
#include "mmce/laplace.hpp"

using namespace mmce;

namespace {

RealLiftedProblem make_problem(Index m_t, Index m_r, Index k, double snr_db) {
  Rng rng(1234);
  const ClusterGeometry g = sample_cluster_geometry(rng, 4, 10, 3.5);
  const ChannelRealization ch = synthesize_channel(g, m_r, m_t, rng);
  const PilotMatrix pilots = generate_pilots(rng, m_t, k);
  const double sigma2 = 1.0 / (2.0 * std::pow(10.0, snr_db / 10.0));
  return synthesize_problem(ch, pilots, sigma2, rng);
}

void BM_OperatorApply(benchmark::State& state) {
  const Index m = state.range(0);
  const RealLiftedProblem p = make_problem(m, m, 2 * m, 10.0);
  Vec v = Vec::Ones(p.A.cols());
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.A.apply(v));
  }
  state.SetComplexityN(m);
}
BENCHMARK(BM_OperatorApply)->Arg(16)->Arg(32)->Arg(64)->Complexity();

void BM_OperatorAbs2(benchmark::State& state) {
  const Index m = state.range(0);
  const RealLiftedProblem p = make_problem(m, m, 2 * m, 10.0);
  Vec v = Vec::Ones(p.A.cols());
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.A.apply_abs2(v));
  }
}
BENCHMARK(BM_OperatorAbs2)->Arg(16)->Arg(32)->Arg(64);

void BM_LaplaceDenoiser(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  const Index n = 4096;
  Vec r(n), mu(n);
  for (auto& v : r) v = 3.0 * gauss(rng);
  for (auto& v : mu) v = std::abs(gauss(rng)) + 0.01;
  const LaplacePrior prior{1.0};
  for (auto _ : state) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      acc += laplace_posterior_stats(r(i), mu(i), prior).mean;
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LaplaceDenoiser);

void BM_Erfcx(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-6.0, 30.0);
  Vec xs(4096);
  for (auto& v : xs) v = uni(rng);
  for (auto _ : state) {
    double acc = 0.0;
    for (Index i = 0; i < xs.size(); ++i) acc += erfcx(xs(i));
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * xs.size());
}
BENCHMARK(BM_Erfcx);

void BM_GampSolve(benchmark::State& state) {
  const Index m = state.range(0);
  const RealLiftedProblem p = make_problem(m, m, 2 * m, 10.0);
  for (auto _ : state) {
    const GampResult res =
        run_gamp(p.A, p.y, LaplaceDenoiser(1.0), p.sigma2_w);
    benchmark::DoNotOptimize(res.x_hat);
  }
}
BENCHMARK(BM_GampSolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_LmmseSolve(benchmark::State& state) {
  const Index m = state.range(0);
  const RealLiftedProblem p = make_problem(m, m, 2 * m, 10.0);
  for (auto _ : state) {
    const BaselineEstimate est =
        lmmse_estimate(p.A, p.y, p.sigma2_w, 0.5);
    benchmark::DoNotOptimize(est.x_hat);
  }
}
BENCHMARK(BM_LmmseSolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
