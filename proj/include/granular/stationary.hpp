#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "granular/measure.hpp"
#include "granular/potentials.hpp"

namespace granular {

/// Self-consistent steady state rho = Z^{-1} exp(-V - W*rho) together with
/// the multiplier lambda of the optimality condition
///   -log rho - V - W*rho = lambda   on {rho > 0}.
struct StationaryState {
  GridMeasure mu;
  double lambda_mult = 0.0;
  double residual_inf = 0.0;
  int iterations = 0;
  std::optional<double> pinned_mean;

  /// GridMeasure CSV with a `# lambda=... residual=... iters=...` sidecar line.
  void write_csv(const std::string& path) const;
};

/// Damped fixed-point iteration rho <- (1-damping) rho + damping * Gibbs(rho)
/// with Gibbs(rho) = normalize(exp(-V - W*rho)). Stops when the L1 change
/// drops below tol.
///
/// When V = 0 the steady states form a translation family, so pin_mean is
/// mandatory; each iterate is recentred to that mean by a circular whole-cell
/// shift plus a linear sub-cell blend. `init` overrides the default unit
/// Gaussian initializer (centred at pin_mean when given).
///
/// Throws when max_iter is exhausted (message carries the last two L1
/// changes) or when the change grows over 50 consecutive iterations, which
/// indicates an oscillating iteration, e.g. in a multi-well regime with
/// several steady states.
StationaryState fixed_point_solve(const PotentialSpec& v, const PotentialSpec& w, double lo,
                                  double hi, int m,
                                  std::optional<double> pin_mean = std::nullopt,
                                  double damping = 0.5, double tol = 1e-10,
                                  int max_iter = 20000,
                                  const GridMeasure* init = nullptr);

/// Recomputes sup |(-log rho - V - W*rho) - lambda| over cells with
/// density > 1e-10, with lambda the density-weighted mean of the same
/// expression. Idempotent with the stored residual up to 1e-12.
double stationarity_residual(const StationaryState& s, const PotentialSpec& v,
                             const PotentialSpec& w);

/// Pushes s.mu through n_perturbations random monotone maps (the wj_probe
/// family; mean-preserving when V = 0) and checks the free energy never drops
/// by more than 1e-9. Pushforward energies use the exact change-of-variables
/// entropy, so no regridding bias enters the comparison.
bool minimizer_audit(const StationaryState& s, const PotentialSpec& v, const PotentialSpec& w,
                     int n_perturbations, std::uint64_t seed);

enum class CoercivityCase { i, ii, iii, iv };

/// Grid certificate for one of the free-energy coercivity hypotheses:
///   i:   V = 0, W convex and W(x) >= b x^2 - b' with b > 0
///   ii:  V(x) >= a|x| - a' with a > 0, and W(x) >= b x^2 - b' with b > 0
///   iii: V(x) >= a x^2 - a' with a > 0, and W(x) >= b x^2 - b' with b > -a
///   iv:  V satisfies a transportation inequality -- not certifiable from
///        grid data; only exp(-V) normalizability and a finite second moment
///        are checked and talagrand_checked stays false.
/// Envelope coefficients are fitted from below on the given grid (largest
/// slope over |x| >= 1, offset raised until the bound holds at every cell),
/// so they certify the inequality on the grid only.
struct CoercivityReport {
  CoercivityCase which = CoercivityCase::i;
  bool holds = false;
  double a = 0.0, a_prime = 0.0;  // V envelope (cases ii, iii)
  double b = 0.0, b_prime = 0.0;  // W envelope (cases i-iii)
  bool w_convex = false;          // sampled second-difference check (case i)
  bool talagrand_checked = false;
  std::string note;
};

CoercivityReport coercivity_diagnostics(const PotentialSpec& v, const PotentialSpec& w,
                                        CoercivityCase which, double lo, double hi, int m);

}  // namespace granular
