#pragma once

#include <utility>
#include <vector>

namespace granular {

enum class FitKind { exponential, polynomial };

struct RateReport {
  double lambda_fit = 0.0;
  double intercept = 0.0;  // fitted log-value at t = 0
  double r_squared = 1.0;
  double t_lo = 0.0, t_hi = 0.0;
  FitKind kind = FitKind::exponential;
};

/// Least squares on log(value) = intercept - lambda * t over samples with
/// t in [t_lo, t_hi]. Requires >= 5 points in the window, all values > 0.
RateReport fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                           double t_lo, double t_hi);

struct EnvelopeFit {
  double c_fit = 0.0;
  bool holds = false;
};

/// Largest c such that value(t) <= (value(t0)^{-p} + c (t-t0))^{-1/p} at every
/// sample; holds iff c_fit >= c_required.
EnvelopeFit fit_polynomial_envelope(const std::vector<double>& times,
                                    const std::vector<double>& values, double p,
                                    double c_required);

/// Default fitting window: drop the first 10% of the time span (transient) and
/// the tail where the value sits below floor_value (resolution floor). Relaxes
/// both cuts in turn if fewer than 5 samples survive.
std::pair<double, double> default_fit_window(const std::vector<double>& times,
                                             const std::vector<double>& values,
                                             double floor_value);

/// Envelope constant of the polynomial contraction bound
///   W2(t) <= (W2(0)^{-p} + c t)^{-1/p}
/// implied by d/dt W2^2 <= -c_deg eps^p (2 W2^2 - eps^2) for all admissible
/// eps. Optimizing eps^2 = 2p W2^2 / (p+2) gives
///   d/dt W2^2 <= -c_deg (2p/(p+2))^{p/2} (4/(p+2)) (W2^2)^{1+p/2},
/// and integrating the comparison ODE for W2 yields
///   c = (2 p c_deg / (p+2)) (2p/(p+2))^{p/2}.
/// For p = 1, c_deg = 1/2 this is (1/3) sqrt(2/3) ~= 0.2721655.
double degenerate_envelope_constant(double p, double c_deg);

/// Contraction rate surviving a bounded perturbation of the interaction
/// potential: (c - alpha) e^{-2 sup_w} + alpha + beta, where c is the
/// unperturbed rate, alpha/beta the convexity moduli of V and the perturbed
/// part of W, and sup_w the sup-norm of the perturbation.
double perturbed_reference_rate(double c, double alpha, double beta, double sup_w);

}  // namespace granular
