#include "mmce/channel.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mmce {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

cplx complex_gaussian(Rng& rng, double variance) {
  // CN(0, variance): each real part N(0, variance/2).
  std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

}  // namespace

int ClusterGeometry::total_subpaths() const {
  int total = 0;
  for (const auto& c : clusters) total += c.subpaths;
  return total;
}

CVec steering_vector(Index m, double cos_angle) {
  if (m < 1) throw std::invalid_argument("steering_vector: M must be >= 1");
  if (std::abs(cos_angle) > 1.0) {
    throw std::domain_error("steering_vector: |directional cosine| > 1");
  }
  CVec a(m);
  for (Index i = 0; i < m; ++i) {
    const double phase = -M_PI * static_cast<double>(i) * cos_angle;
    a[i] = cplx(std::cos(phase), std::sin(phase));
  }
  return a;
}

CMat dft_matrix(Index m) {
  CMat u(m, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index k = 0; k < m; ++k) {
    for (Index j = 0; j < m; ++j) {
      const double phase = -2.0 * M_PI * static_cast<double>(k * j) / m;
      u(k, j) = scale * cplx(std::cos(phase), std::sin(phase));
    }
  }
  return u;
}

ClusterGeometry sample_cluster_geometry(Rng& rng, int clusters, int subpaths,
                                        double spread_deg,
                                        const std::vector<double>& power_profile) {
  if (clusters < 1 || subpaths < 1) {
    throw std::invalid_argument("sample_cluster_geometry: P, Q must be >= 1");
  }
  std::vector<double> powers = power_profile;
  if (powers.empty()) {
    powers.assign(clusters, 1.0 / clusters);
  } else {
    if (static_cast<int>(powers.size()) != clusters) {
      throw std::invalid_argument("power profile size != cluster count");
    }
    const double total = std::accumulate(powers.begin(), powers.end(), 0.0);
    for (auto& p : powers) p /= total;
  }
  std::uniform_real_distribution<double> uniform_angle(0.0, M_PI);
  ClusterGeometry geo;
  geo.clusters.reserve(clusters);
  for (int p = 0; p < clusters; ++p) {
    Cluster c;
    c.subpaths = subpaths;
    c.mean_aod = uniform_angle(rng);
    c.mean_aoa = uniform_angle(rng);
    c.spread_deg = spread_deg;
    c.power = powers[p];
    geo.clusters.push_back(c);
  }
  return geo;
}

ChannelRealization synthesize_channel(const ClusterGeometry& geometry, Index m_r,
                                      Index m_t, Rng& rng) {
  ChannelRealization ch;
  ch.H = CMat::Zero(m_r, m_t);
  for (const auto& c : geometry.clusters) {
    const double spread = c.spread_deg * kDegToRad;
    const double subpath_power = c.power / c.subpaths;
    std::uniform_real_distribution<double> jitter(-spread, spread);
    for (int q = 0; q < c.subpaths; ++q) {
      const double aod = c.mean_aod + (spread > 0.0 ? jitter(rng) : 0.0);
      const double aoa = c.mean_aoa + (spread > 0.0 ? jitter(rng) : 0.0);
      const cplx gain = complex_gaussian(rng, subpath_power);
      const double ct = std::cos(aod);
      const double cr = std::cos(aoa);
      ch.gains.push_back(gain);
      ch.cos_aod.push_back(ct);
      ch.cos_aoa.push_back(cr);
      ch.H.noalias() +=
          gain * steering_vector(m_r, cr) * steering_vector(m_t, ct).adjoint();
    }
  }
  return ch;
}

CMat to_angular(const CMat& h) {
  return dft_matrix(h.rows()).adjoint() * h * dft_matrix(h.cols());
}

CMat from_angular(const CMat& h_angular) {
  return dft_matrix(h_angular.rows()) * h_angular *
         dft_matrix(h_angular.cols()).adjoint();
}

PilotMatrix generate_pilots(Rng& rng, Index m_t, Index k) {
  if (m_t < 1 || k < 1) {
    throw std::invalid_argument("generate_pilots: M_t, K must be >= 1");
  }
  PilotMatrix p;
  p.B.resize(m_t, k);
  const double entry_var = 1.0 / static_cast<double>(m_t);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < m_t; ++i) {
      p.B(i, j) = complex_gaussian(rng, entry_var);
    }
  }
  return p;
}

Vec lift_complex(const CMat& z) {
  const Index half = z.size();
  Vec out(2 * half);
  Eigen::Map<Mat>(out.data(), z.rows(), z.cols()) = z.real();
  Eigen::Map<Mat>(out.data() + half, z.rows(), z.cols()) = z.imag();
  return out;
}

CMat unlift_real(const Vec& v, Index m_r, Index n) {
  if (v.size() != 2 * m_r * n) {
    throw std::invalid_argument("unlift_real: length mismatch");
  }
  CMat out(m_r, n);
  out.real() = Eigen::Map<const Mat>(v.data(), m_r, n);
  out.imag() = Eigen::Map<const Mat>(v.data() + m_r * n, m_r, n);
  return out;
}

RealLiftedProblem synthesize_problem(const ChannelRealization& channel,
                                     const PilotMatrix& pilots, double sigma2_w,
                                     Rng& rng) {
  if (!(sigma2_w > 0.0)) {
    throw std::domain_error("synthesize_problem: sigma2_w must be > 0");
  }
  const Index m_r = channel.H.rows();
  const Index m_t = channel.H.cols();
  if (pilots.B.rows() != m_t) {
    throw std::invalid_argument("synthesize_problem: pilot rows != M_t");
  }
  const Index k = pilots.B.cols();

  CMat h_ang = to_angular(channel.H);
  CMat noise(m_r, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < m_r; ++i) {
      noise(i, j) = complex_gaussian(rng, 2.0 * sigma2_w);
    }
  }
  CMat y_mat = h_ang * pilots.B + noise;

  RealLiftedProblem prob{
      lift_complex(y_mat),
      LinearOperator::real_lifted_kron(pilots.B, m_r),
      lift_complex(h_ang),
      sigma2_w,
      m_r,
      m_t,
  };
  return prob;
}

}  // namespace mmce
