#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace granular {

/// Tag used by solvers to dispatch exact fast paths (quadratic mean-field
/// shift, cubic sorted prefix sums). `custom` always takes the generic route.
enum class PotentialFamily {
  zero,
  quadratic,
  power_abs,
  cubic_abs,
  double_well,
  pseudo_huber,
  gauss_well,
  custom,
};

/// Immutable description of a confinement or interaction potential on R.
/// `alpha` is a global lower bound on the second derivative; `outside_kr`
/// holds (K, R) with hess >= K for |x| >= R when such a pair is known;
/// `sup_abs` is sup |value| for bounded potentials.
struct PotentialSpec {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> grad;
  std::function<double(double)> hess;
  double alpha = 0.0;
  std::optional<std::pair<double, double>> outside_kr;
  std::optional<double> sup_abs;
  bool is_even = true;
  PotentialFamily family = PotentialFamily::custom;
  std::vector<double> params;

  bool is_zero() const { return family == PotentialFamily::zero; }
};

/// Catalog factory. Known names (parameter counts in brackets):
///   zero[], quadratic[a], power_abs[e] (|x|^{2+e}), cubic_abs[R=1],
///   double_well[eps] (x^4 - eps x^2), pseudo_huber[] (sqrt(1+x^2)),
///   gauss_well[K] (-K exp(-x^2)).
/// Throws std::invalid_argument on unknown name or bad parameters.
PotentialSpec builtin(const std::string& name, const std::vector<double>& params = {});

struct DoublingReport {
  bool holds = false;        // false when 1+V(x)+V(y) <= 0 somewhere on the lattice
  double c = 0.0;            // smallest C with V(x+y) <= C(1+V(x)+V(y)) on the lattice
  bool shifted = false;      // constant computed for V - min V instead
};

/// Lattice scan for the doubling inequality V(x+y) <= C(1+V(x)+V(y)).
DoublingReport check_doubling(const PotentialSpec& p, double lo, double hi, int n);

struct PairScanReport {
  bool holds = true;
  double worst_slack = 0.0;  // min over scanned pairs of LHS - RHS
  double worst_x = 0.0;
  double worst_y = 0.0;
};

/// Checks (grad(x)-grad(y))(x-y) >= (K/3)|x-y|^2 over all grid pairs with
/// |x| >= 2R or |y| >= 2R.
PairScanReport check_uniform_convexity_outside(const PotentialSpec& p, double k_out,
                                               double r_out, double lo, double hi, int n);

/// Checks the degenerate convexity envelope
///   (grad(y)-grad(x))(y-x) >= c_deg * eps^p * (|y-x|^2 - eps^2)
/// for every grid pair and every eps in eps_list.
PairScanReport check_degenerate_convexity(const PotentialSpec& p, double pow_p, double c_deg,
                                          const std::vector<double>& eps_list, double lo,
                                          double hi, int n);

struct DerivativeCheck {
  double max_rel_grad = 0.0;
  double max_rel_hess = 0.0;
};

/// Central finite-difference verification of grad against value and hess
/// against grad, sampled at n midpoints of [lo,hi] (midpoints avoid kinks at
/// lattice-aligned points such as x=0 for |x|^3).
DerivativeCheck verify_derivatives(const PotentialSpec& p, double lo, double hi, int n,
                                   double step = 1e-5);

}  // namespace granular
