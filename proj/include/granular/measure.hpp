#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "granular/potentials.hpp"

namespace granular {

/// Probability density sampled on a uniform cell-centred grid over [lo, hi]:
/// cell i has centre lo + (i+0.5)*dx, dx = (hi-lo)/m. Densities are kept as
/// given (some diagnostics intentionally operate on unnormalized densities);
/// operations that require a probability measure check is_normalized first.
class GridMeasure {
 public:
  GridMeasure(double lo, double hi, std::vector<double> density);

  /// Point-evaluates f at cell centres; normalizes when requested.
  static GridMeasure from_function(double lo, double hi, int m,
                                   const std::function<double(double)>& f,
                                   bool normalize_mass = true);
  static GridMeasure gaussian(double lo, double hi, int m, double mean, double sigma);
  /// 0.5 N(-centre, sigma^2) + 0.5 N(centre, sigma^2); even, mean zero.
  static GridMeasure bimodal(double lo, double hi, int m, double centre, double sigma);
  static GridMeasure uniform(double lo, double hi, int m, double a, double b);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int m() const { return static_cast<int>(density_.size()); }
  double dx() const { return dx_; }
  double centre(int i) const { return lo_ + (i + 0.5) * dx_; }
  const std::vector<double>& density() const { return density_; }
  std::vector<double>& density() { return density_; }
  std::vector<double> centres() const;

  double mass() const;
  double mean() const;
  double second_moment() const;
  bool is_normalized(double tol = 1e-8) const;
  void normalize();

  /// CDF at cell right edges; F(lo) = 0 prepended (size m+1).
  std::vector<double> cdf_edges() const;
  /// Generalized inverse CDF by linear interpolation within cells.
  double quantile(double u) const;

  /// True if every strictly interior cell of [first, last] positive cell is
  /// itself positive.
  bool has_connected_support() const;
  std::pair<int, int> support_range() const;  // first/last index with density > 0

  void write_csv(const std::string& path) const;
  static GridMeasure read_csv(const std::string& path);

 private:
  double lo_, hi_, dx_;
  std::vector<double> density_;
};

/// Finite interacting-particle system with its own noise stream. The stream is
/// seeded once from `seed`; reading an ensemble back from CSV restarts the
/// stream from the stored seed.
struct ParticleEnsemble {
  std::vector<double> positions;
  std::uint64_t seed = 0;
  double time = 0.0;
  std::mt19937_64 engine;

  ParticleEnsemble() = default;
  ParticleEnsemble(std::vector<double> pos, std::uint64_t seed_, double time_ = 0.0)
      : positions(std::move(pos)), seed(seed_), time(time_), engine(seed_) {}

  double mean() const;
  double second_moment() const;

  void write_csv(const std::string& path) const;
  static ParticleEnsemble read_csv(const std::string& path);
};

/// a[i] = (W.grad * mu)(x_i) = sum_j W.grad(x_i - x_j) rho_j dx.
std::vector<double> convolve_grad_w(const GridMeasure& mu, const PotentialSpec& w);

/// Entropy + confinement + interaction energy:
///   int mu log mu + int V dmu + 0.5 int int W(x-y) dmu dmu,
/// with 0 log 0 = 0.
double free_energy(const GridMeasure& mu, const PotentialSpec& v, const PotentialSpec& w);

/// Free energy of the pushforward of mu by a strictly increasing map without
/// gridding it: the entropy term uses the change of variables
///   int T#mu log T#mu = int mu log mu - int mu log T'.
double free_energy_pushforward(const GridMeasure& mu, const std::function<double(double)>& t_of,
                               const std::function<double(double)>& dt_of,
                               const PotentialSpec& v, const PotentialSpec& w);

/// Histogram of positions restricted to [lo, hi] (outside samples dropped),
/// normalized. Throws if every particle falls outside.
GridMeasure particles_to_grid(const ParticleEnsemble& p, double lo, double hi, int m);

/// Inverse-CDF sampling; deterministic for a given seed.
ParticleEnsemble sample_from_grid(const GridMeasure& mu, int n, std::uint64_t seed);

}  // namespace granular
