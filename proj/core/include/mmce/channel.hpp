#pragma once

#include <random>
#include <vector>

#include "mmce/linear_operator.hpp"
#include "mmce/types.hpp"

namespace mmce {

using Rng = std::mt19937_64;

struct Cluster {
  int subpaths;
  double mean_aod;     // radians, in [0, pi]
  double mean_aoa;     // radians, in [0, pi]
  double spread_deg;   // angular spread, degrees
  double power;        // sigma_p^2; cluster powers sum to 1
};

struct ClusterGeometry {
  std::vector<Cluster> clusters;

  int total_subpaths() const;
};

struct ChannelRealization {
  CMat H;  // M_r x M_t
  // Flat per-subpath parameters, cluster-major.
  std::vector<cplx> gains;
  std::vector<double> cos_aod;  // directional cosines, in [-1, 1]
  std::vector<double> cos_aoa;
};

struct PilotMatrix {
  CMat B;  // M_t x K, entries iid CN(0, 1/M_t) so E{||column||^2} = 1
};

struct RealLiftedProblem {
  Vec y;               // length M = 2 M_r K
  LinearOperator A;
  Vec x_true;          // length N = 2 M_r M_t, retained for scoring
  double sigma2_w;     // noise variance per real component; SNR = 1/(2 sigma2_w)
  Index m_r = 0;
  Index m_t = 0;
};

/// ULA response with half-wavelength spacing: entry m is exp(-j pi m cos_angle).
CVec steering_vector(Index m, double cos_angle);

/// Unitary DFT matrix, [U]_{k,m} = exp(-j 2 pi k m / M) / sqrt(M), 0-indexed.
CMat dft_matrix(Index m);

/// Draws cluster means uniformly on [0, pi] and splits unit channel power
/// across clusters according to power_profile (empty = equal split).
ClusterGeometry sample_cluster_geometry(Rng& rng, int clusters, int subpaths,
                                        double spread_deg,
                                        const std::vector<double>& power_profile = {});

/// Assembles H as the double sum of rank-1 steering outer products with
/// subpath gains CN(0, sigma_p^2 / Q_p) and per-subpath angles uniform in
/// [mean - spread, mean + spread].
ChannelRealization synthesize_channel(const ClusterGeometry& geometry, Index m_r,
                                      Index m_t, Rng& rng);

/// Angular-domain representation U_r^H H U_t.
CMat to_angular(const CMat& h);
/// Inverse map U_r H~ U_t^H.
CMat from_angular(const CMat& h_angular);

PilotMatrix generate_pilots(Rng& rng, Index m_t, Index k);

/// Builds the noisy lifted real estimation problem: Y~ = H~ B + W~ with W~
/// entries CN(0, 2 sigma2_w), then stacks real over imaginary parts.
RealLiftedProblem synthesize_problem(const ChannelRealization& channel,
                                     const PilotMatrix& pilots, double sigma2_w,
                                     Rng& rng);

/// Real lifting of vec(Z): [Re; Im].
Vec lift_complex(const CMat& z);
/// Inverse of lift_complex for an m_r x n matrix.
CMat unlift_real(const Vec& v, Index m_r, Index n);

}  // namespace mmce
