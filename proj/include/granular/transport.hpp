#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "granular/measure.hpp"
#include "granular/potentials.hpp"

namespace granular {

/// Monotone transport map with its derivative. dt_of is piecewise constant for
/// grid-built maps and is clamped to >= 1e-12 (clamped_cells counts how many
/// support cells needed the clamp; acceptance runs reject maps with clamps).
struct TransportMap {
  std::function<double(double)> t_of;
  std::function<double(double)> dt_of;
  std::string description;
  int clamped_cells = 0;
};

TransportMap translation_map(double delta);
TransportMap dilation_map(double centre, double lambda);
/// Continuous piecewise-linear map: value anchor at knots[0], per-segment
/// slopes (slopes.size() == knots.size()+1 counting the two outer rays).
TransportMap piecewise_linear_map(const std::vector<double>& knots,
                                  const std::vector<double>& slopes, double anchor_value);

/// Quadratic Wasserstein distance via the quantile representation,
/// W2^2 = int_0^1 (Q_mu - Q_nu)^2 du, midpoint rule with n_quad nodes
/// (default 4 * max(m_mu, m_nu)). Both measures must be normalized.
double wasserstein2(const GridMeasure& mu, const GridMeasure& nu, int n_quad = 0);

/// Exact distance between equal-size empirical measures (sorted matching).
double wasserstein2_particles(const ParticleEnsemble& a, const ParticleEnsemble& b);

/// Monotone rearrangement T = Q_nu o F_mu pushing mu to nu.
/// mu must have connected support.
TransportMap brenier_map(const GridMeasure& mu, const GridMeasure& nu);

/// Entropy-dissipation functional of the pair (mu, T#mu):
///   int [ T' + 1/T' - 2 + (V'(T(x)) - V'(x)) (T(x) - x) ] dmu
/// + 1/2 int int (W'(T(x)-T(y)) - W'(x-y)) ((T(x)-x) - (T(y)-y)) dmu dmu.
double dissipation_j(const GridMeasure& mu, const TransportMap& t, const PotentialSpec& v,
                     const PotentialSpec& w);

/// Lower bound C with C * W2^2 <= J for interaction potentials whose Hessian
/// is >= K outside radius R, given the log-density overlap constant M:
///   C = 2 / (3/K + 4 c_n R^{2+n} e^M),  c_n = unit-ball volume.
double wj_constant(double k_out, double r_out, double overlap_m, int dim);

/// Overlap constant M = sup { U(z) - U(x) - U(y) : |x-y| <= 2R, z in [x,y] }
/// for U = -log density, scanned over grid cells. Density must be positive on
/// its (connected) support.
double hyp_u_constant(const GridMeasure& mu, double r_out);

struct ProbeRow {
  int id = 0;
  std::string kind;
  double w2_sq = 0.0;
  double j = 0.0;
  double ratio = 0.0;
};

struct WjProbeReport {
  double min_ratio = 0.0;
  int argmin_id = -1;
  std::string argmin_kind;
  TransportMap argmin_map;
  std::vector<ProbeRow> rows;
  int n_skipped = 0;
};

/// Builds probe k of the wj_probe map family below (identical sub-stream
/// derivation, including the mean-preserving shift). Returns false when the
/// draw degenerates to the identity and the probe should be skipped.
bool random_probe_map(const GridMeasure& mu, int k, std::uint64_t seed, bool preserve_mean,
                      TransportMap& out);

/// Monte-Carlo lower-bound probe of inf J / W2^2 over a family of monotone
/// maps: translations, dilations about the mean, and 8-knot random increasing
/// piecewise-linear maps (log-normal slopes, floored at 1e-6). When
/// preserve_mean is set every map is shifted so the pushforward keeps the mean
/// of mu; translation probes then collapse to the identity and are replaced by
/// additional piecewise-linear probes. Probes with W2 = 0 are skipped.
/// Deterministic for fixed (seed, n_probes): probe k uses a sub-stream derived
/// from (seed, k) and ties are resolved by the smallest probe id.
WjProbeReport wj_probe(const GridMeasure& mu, const PotentialSpec& v, const PotentialSpec& w,
                       int n_probes, std::uint64_t seed, bool preserve_mean);

/// r(M) = (1/M) int (V'(x+M) - V'(x)) dmu for each M in m_values: the
/// translation-probe ratio J/W2^2 for T(x) = x + M when W = 0. A decay of
/// r(M) -> 0 witnesses that no uniform WJ constant exists.
std::vector<double> translation_probe(const GridMeasure& mu, const PotentialSpec& v,
                                      const std::vector<double>& m_values);

}  // namespace granular
