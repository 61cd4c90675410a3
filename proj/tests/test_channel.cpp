#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mmce/channel.hpp"
#include "mmce/evaluate.hpp"
#include "oracles.hpp"

using namespace mmce;

TEST_CASE("steering vector examples") {
  const CVec a0 = steering_vector(4, 0.0);
  for (Index m = 0; m < 4; ++m) CHECK(std::abs(a0(m) - cplx(1.0, 0.0)) == 0.0);

  const CVec a1 = steering_vector(2, 1.0);
  CHECK(std::abs(a1(0) - cplx(1.0, 0.0)) <= 1e-15);
  CHECK(std::abs(a1(1) - cplx(-1.0, 0.0)) <= 1e-15);

  const CVec a = steering_vector(8, 0.3);
  for (Index m = 0; m < 8; ++m) {
    const cplx ref = std::exp(cplx(0.0, -M_PI * double(m) * 0.3));
    CHECK(std::abs(a(m) - ref) <= 1e-14);
  }

  CHECK_THROWS_AS(steering_vector(4, 1.5), std::domain_error);
}

TEST_CASE("dft matrix is unitary") {
  const CMat u = dft_matrix(16);
  const CMat gram = u.adjoint() * u;
  CHECK((gram - CMat::Identity(16, 16)).norm() <= 1e-12);
}

TEST_CASE("cluster geometry sampling") {
  Rng rng(21);
  const ClusterGeometry g = sample_cluster_geometry(rng, 4, 10, 3.5);
  CHECK(g.clusters.size() == 4);
  CHECK(g.total_subpaths() == 40);
  double total = 0.0;
  for (const auto& c : g.clusters) {
    CHECK(c.subpaths == 10);
    CHECK(c.mean_aod >= 0.0);
    CHECK(c.mean_aod <= M_PI);
    CHECK(c.mean_aoa >= 0.0);
    CHECK(c.mean_aoa <= M_PI);
    total += c.power;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cluster mean angles are uniform on [0, pi]") {
  Rng rng(22);
  std::vector<double> samples;
  for (int i = 0; i < 10000; ++i) {
    const ClusterGeometry g = sample_cluster_geometry(rng, 1, 1, 0.0);
    samples.push_back(g.clusters[0].mean_aod);
  }
  std::sort(samples.begin(), samples.end());
  // Kolmogorov-Smirnov against U[0, pi]; 1% critical value 1.63/sqrt(n).
  double ks = 0.0;
  const double n = double(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = samples[i] / M_PI;
    ks = std::max(ks, std::abs(cdf - double(i) / n));
    ks = std::max(ks, std::abs(cdf - double(i + 1) / n));
  }
  CHECK(ks <= 1.63 / std::sqrt(n));
}

TEST_CASE("single path with zero spread sits at the cluster mean") {
  Rng rng(23);
  const ClusterGeometry g = sample_cluster_geometry(rng, 1, 1, 0.0);
  const ChannelRealization ch = synthesize_channel(g, 4, 4, rng);
  REQUIRE(ch.cos_aod.size() == 1);
  CHECK(ch.cos_aod[0] == doctest::Approx(std::cos(g.clusters[0].mean_aod)));
  CHECK(ch.cos_aoa[0] == doctest::Approx(std::cos(g.clusters[0].mean_aoa)));
}

TEST_CASE("channel reconstructs from stored subpath parameters") {
  Rng rng(24);
  const ClusterGeometry g = sample_cluster_geometry(rng, 2, 5, 3.5);
  const Index m_r = 8, m_t = 8;
  const ChannelRealization ch = synthesize_channel(g, m_r, m_t, rng);
  CMat rebuilt = CMat::Zero(m_r, m_t);
  for (std::size_t i = 0; i < ch.gains.size(); ++i) {
    rebuilt += ch.gains[i] * steering_vector(m_r, ch.cos_aoa[i]) *
               steering_vector(m_t, ch.cos_aod[i]).adjoint();
  }
  CHECK((ch.H - rebuilt).norm() <= 1e-12 * ch.H.norm());
  CHECK(Eigen::JacobiSVD<CMat>(ch.H).rank() <= g.total_subpaths());
}

TEST_CASE("average channel power matches the normalization") {
  Rng rng(25);
  const Index m = 16;
  double total = 0.0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) {
    const ClusterGeometry g = sample_cluster_geometry(rng, 4, 10, 3.5);
    total += synthesize_channel(g, m, m, rng).H.squaredNorm();
  }
  CHECK(total / draws == doctest::Approx(double(m * m)).epsilon(0.03));
}

TEST_CASE("angular transform round trip and unitarity") {
  Rng rng(26);
  std::normal_distribution<double> gauss;
  CMat h(8, 8);
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 8; ++j) h(i, j) = cplx(gauss(rng), gauss(rng));
  }
  const CMat ht = to_angular(h);
  CHECK(ht.norm() == doctest::Approx(h.norm()).epsilon(1e-12));
  CHECK((from_angular(ht) - h).norm() <= 1e-12 * h.norm());
  CHECK((to_angular(from_angular(ht)) - ht).norm() <= 1e-12 * ht.norm());
  CHECK(from_angular(CMat::Zero(8, 8)).norm() == 0.0);
}

TEST_CASE("on-grid single path concentrates in one angular entry") {
  const Index m = 8;
  const Index row = 3, col = 5;
  // Column m of the DFT basis peaks at cos(angle) = 2 m / M.
  const double omega_r = 2.0 * double(row) / double(m) > 1.0
                             ? 2.0 * double(row) / double(m) - 2.0
                             : 2.0 * double(row) / double(m);
  const double omega_t = 2.0 * double(col) / double(m) > 1.0
                             ? 2.0 * double(col) / double(m) - 2.0
                             : 2.0 * double(col) / double(m);
  const CMat h = steering_vector(m, omega_r) *
                 steering_vector(m, omega_t).adjoint();
  const CMat ht = to_angular(h);
  double peak = 0.0;
  Index pr = 0, pc = 0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (std::abs(ht(i, j)) > peak) {
        peak = std::abs(ht(i, j));
        pr = i;
        pc = j;
      }
    }
  }
  CHECK(pr == row);
  CHECK(pc == col);
  CHECK(peak * peak >= 0.999 * ht.squaredNorm());
}

TEST_CASE("pilot normalization") {
  Rng rng(27);
  const Index m_t = 8;
  const PilotMatrix p = generate_pilots(rng, m_t, 10000);
  double mean_col = 0.0;
  for (Index k = 0; k < p.B.cols(); ++k) mean_col += p.B.col(k).squaredNorm();
  mean_col /= double(p.B.cols());
  CHECK(mean_col == doctest::Approx(1.0).epsilon(0.02));

  const PilotMatrix scalar = generate_pilots(rng, 1, 4096);
  double pw = 0.0;
  for (Index k = 0; k < scalar.B.cols(); ++k)
    pw += std::norm(scalar.B(0, k));
  CHECK(pw / 4096.0 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("synthesized problem dimensions and noiseless consistency") {
  Rng rng(28);
  const ClusterGeometry g = sample_cluster_geometry(rng, 2, 5, 3.5);
  const ChannelRealization ch = synthesize_channel(g, 4, 6, rng);
  const PilotMatrix p = generate_pilots(rng, 6, 9);
  const RealLiftedProblem prob = synthesize_problem(ch, p, 1e-30, rng);
  CHECK(prob.y.size() == 2 * 4 * 9);
  CHECK(prob.x_true.size() == 2 * 4 * 6);
  CHECK((prob.y - prob.A.apply(prob.x_true)).norm() <=
        1e-10 * prob.y.norm());
}

TEST_CASE("empirical SNR matches 1/(2 sigma2)") {
  Rng rng(29);
  const double sigma2 = 0.05;
  double sig = 0.0, noise = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const ClusterGeometry g = sample_cluster_geometry(rng, 2, 5, 3.5);
    const ChannelRealization ch = synthesize_channel(g, 4, 4, rng);
    const PilotMatrix p = generate_pilots(rng, 4, 4);
    const RealLiftedProblem prob = synthesize_problem(ch, p, sigma2, rng);
    const Vec clean = prob.A.apply(prob.x_true);
    sig += clean.squaredNorm();
    noise += (prob.y - clean).squaredNorm();
  }
  CHECK(sig / noise ==
        doctest::Approx(1.0 / (2.0 * sigma2)).epsilon(0.05));
}

TEST_CASE("nmse is unitarily invariant between domains") {
  Rng rng(30);
  std::normal_distribution<double> gauss;
  const Index m = 6;
  CMat h(m, m), est(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      h(i, j) = cplx(gauss(rng), gauss(rng));
      est(i, j) = cplx(gauss(rng), gauss(rng));
    }
  }
  const double angular =
      nmse(lift_complex(to_angular(est)), lift_complex(to_angular(h)));
  const double physical = nmse(lift_complex(est), lift_complex(h));
  CHECK(angular == doctest::Approx(physical).epsilon(1e-10));
}

TEST_CASE("combined noise stays white") {
  Rng rng(31);
  const double sigma2 = 0.5;
  const Index m_r = 4, k = 4;
  double sum_sq = 0.0;
  double cross = 0.0;
  int n = 0;
  for (int i = 0; i < 500; ++i) {
    const ClusterGeometry g = sample_cluster_geometry(rng, 1, 1, 0.0);
    const ChannelRealization ch = synthesize_channel(g, m_r, 4, rng);
    const PilotMatrix p = generate_pilots(rng, 4, k);
    const RealLiftedProblem prob = synthesize_problem(ch, p, sigma2, rng);
    const Vec w = prob.y - prob.A.apply(prob.x_true);
    sum_sq += w.squaredNorm();
    for (Index j = 0; j + 1 < w.size(); j += 2) cross += w(j) * w(j + 1);
    n += int(w.size());
  }
  CHECK(sum_sq / n == doctest::Approx(sigma2).epsilon(0.05));
  CHECK(std::abs(cross / (n / 2)) <= 0.05 * sigma2);
}

TEST_CASE("lift and unlift are inverse") {
  Rng rng(32);
  std::normal_distribution<double> gauss;
  CMat z(3, 5);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 5; ++j) z(i, j) = cplx(gauss(rng), gauss(rng));
  }
  const Vec v = lift_complex(z);
  CHECK(v.size() == 2 * 3 * 5);
  CHECK((unlift_real(v, 3, 5) - z).norm() == 0.0);
}
