#include "granular/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace granular {

RateReport fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                           double t_lo, double t_hi) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_exponential: size mismatch");
  std::vector<double> t, y;
  for (size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t_lo - 1e-12 || times[k] > t_hi + 1e-12) continue;
    if (values[k] <= 0.0)
      throw std::invalid_argument("fit_exponential: nonpositive value in window");
    t.push_back(times[k]);
    y.push_back(std::log(values[k]));
  }
  if (t.size() < 5) throw std::invalid_argument("fit_exponential: fewer than 5 points in window");

  const double n = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    st += t[k];
    sy += y[k];
  }
  const double tbar = st / n, ybar = sy / n;
  double stt = 0.0, sty = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    stt += (t[k] - tbar) * (t[k] - tbar);
    sty += (t[k] - tbar) * (y[k] - ybar);
  }
  if (stt <= 0.0) throw std::invalid_argument("fit_exponential: degenerate time window");
  const double slope = sty / stt;
  const double icept = ybar - slope * tbar;

  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    const double r = y[k] - (icept + slope * t[k]);
    ss_res += r * r;
    ss_tot += (y[k] - ybar) * (y[k] - ybar);
  }
  RateReport rep;
  rep.lambda_fit = -slope;
  rep.intercept = icept;
  rep.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  rep.t_lo = t_lo;
  rep.t_hi = t_hi;
  rep.kind = FitKind::exponential;
  return rep;
}

EnvelopeFit fit_polynomial_envelope(const std::vector<double>& times,
                                    const std::vector<double>& values, double p,
                                    double c_required) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_polynomial_envelope: size mismatch");
  if (times.size() < 2) throw std::invalid_argument("fit_polynomial_envelope: need >= 2 points");
  if (p <= 0.0) throw std::invalid_argument("fit_polynomial_envelope: need p > 0");
  for (double v : values)
    if (v <= 0.0) throw std::invalid_argument("fit_polynomial_envelope: nonpositive value");

  const double t0 = times.front();
  const double inv0 = std::pow(values.front(), -p);
  double c = std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - t0;
    if (dt <= 0.0) throw std::invalid_argument("fit_polynomial_envelope: times not increasing");
    c = std::min(c, (std::pow(values[k], -p) - inv0) / dt);
  }
  EnvelopeFit fit;
  fit.c_fit = c;
  fit.holds = c >= c_required;
  return fit;
}

std::pair<double, double> default_fit_window(const std::vector<double>& times,
                                             const std::vector<double>& values,
                                             double floor_value) {
  if (times.size() != values.size() || times.empty())
    throw std::invalid_argument("default_fit_window: bad inputs");
  const double start = times.front(), span = times.back() - start;
  double t_lo = start + 0.1 * span;
  double t_hi = times.front();
  for (size_t k = 0; k < times.size(); ++k)
    if (values[k] >= floor_value) t_hi = times[k];

  auto count = [&](double a, double b) {
    size_t c = 0;
    for (double tk : times)
      if (tk >= a - 1e-12 && tk <= b + 1e-12) ++c;
    return c;
  };
  if (count(t_lo, t_hi) < 5) t_lo = start;
  if (count(t_lo, t_hi) < 5) t_hi = times.back();
  return {t_lo, t_hi};
}

double degenerate_envelope_constant(double p, double c_deg) {
  if (p <= 0.0 || c_deg <= 0.0)
    throw std::invalid_argument("degenerate_envelope_constant: need p, c_deg > 0");
  return 2.0 * p * c_deg / (p + 2.0) * std::pow(2.0 * p / (p + 2.0), 0.5 * p);
}

double perturbed_reference_rate(double c, double alpha, double beta, double sup_w) {
  return (c - alpha) * std::exp(-2.0 * sup_w) + alpha + beta;
}

}  // namespace granular
