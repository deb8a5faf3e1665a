#include "granular/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace granular {

namespace {

void need_params(const std::string& name, const std::vector<double>& params, size_t n) {
  if (params.size() != n)
    throw std::invalid_argument("builtin(" + name + "): expected " + std::to_string(n) +
                                " parameter(s), got " + std::to_string(params.size()));
}

}  // namespace

PotentialSpec builtin(const std::string& name, const std::vector<double>& params) {
  PotentialSpec p;
  p.name = name;
  p.params = params;

  if (name == "zero") {
    need_params(name, params, 0);
    p.value = [](double) { return 0.0; };
    p.grad = [](double) { return 0.0; };
    p.hess = [](double) { return 0.0; };
    p.alpha = 0.0;
    p.sup_abs = 0.0;
    p.family = PotentialFamily::zero;
    return p;
  }
  if (name == "quadratic") {
    need_params(name, params, 1);
    const double a = params[0];
    if (a <= 0.0) throw std::invalid_argument("builtin(quadratic): need a > 0");
    p.value = [a](double x) { return 0.5 * a * x * x; };
    p.grad = [a](double x) { return a * x; };
    p.hess = [a](double) { return a; };
    p.alpha = a;
    p.family = PotentialFamily::quadratic;
    return p;
  }
  if (name == "power_abs") {
    need_params(name, params, 1);
    const double e = params[0];
    if (e <= 0.0) throw std::invalid_argument("builtin(power_abs): need e > 0");
    const double q = 2.0 + e;
    p.value = [q](double x) { return std::pow(std::abs(x), q); };
    p.grad = [q, e](double x) {
      return x == 0.0 ? 0.0 : q * std::pow(std::abs(x), 1.0 + e) * (x > 0 ? 1.0 : -1.0);
    };
    p.hess = [q, e](double x) { return q * (1.0 + e) * std::pow(std::abs(x), e); };
    p.alpha = 0.0;
    p.family = PotentialFamily::power_abs;
    return p;
  }
  if (name == "cubic_abs") {
    if (params.size() > 1) throw std::invalid_argument("builtin(cubic_abs): at most one parameter (R)");
    const double r_out = params.empty() ? 1.0 : params[0];
    if (r_out <= 0.0) throw std::invalid_argument("builtin(cubic_abs): need R > 0");
    p.value = [](double x) { return std::abs(x) * x * x; };
    p.grad = [](double x) { return 3.0 * std::abs(x) * x; };
    p.hess = [](double x) { return 6.0 * std::abs(x); };
    p.alpha = 0.0;
    p.outside_kr = std::make_pair(6.0 * r_out, r_out);
    p.family = PotentialFamily::cubic_abs;
    p.params = {r_out};
    return p;
  }
  if (name == "double_well") {
    need_params(name, params, 1);
    const double eps = params[0];
    if (eps < 0.0) throw std::invalid_argument("builtin(double_well): need eps >= 0");
    p.value = [eps](double x) { return x * x * x * x - eps * x * x; };
    p.grad = [eps](double x) { return 4.0 * x * x * x - 2.0 * eps * x; };
    p.hess = [eps](double x) { return 12.0 * x * x - 2.0 * eps; };
    p.alpha = -2.0 * eps;
    // hess >= 12R^2 - 2 eps outside |x| >= R; pick R so the bound is positive
    const double r_out = std::sqrt((2.0 * eps + 1.0) / 12.0) + 1.0;
    p.outside_kr = std::make_pair(12.0 * r_out * r_out - 2.0 * eps, r_out);
    p.family = PotentialFamily::double_well;
    return p;
  }
  if (name == "pseudo_huber") {
    need_params(name, params, 0);
    p.value = [](double x) { return std::sqrt(1.0 + x * x); };
    p.grad = [](double x) { return x / std::sqrt(1.0 + x * x); };
    p.hess = [](double x) { return std::pow(1.0 + x * x, -1.5); };
    p.alpha = 0.0;  // hess > 0 but decays to 0 at infinity: no positive lower bound
    p.family = PotentialFamily::pseudo_huber;
    return p;
  }
  if (name == "gauss_well") {
    need_params(name, params, 1);
    const double k = params[0];
    if (k <= 0.0) throw std::invalid_argument("builtin(gauss_well): need K > 0");
    p.value = [k](double x) { return -k * std::exp(-x * x); };
    p.grad = [k](double x) { return 2.0 * k * x * std::exp(-x * x); };
    p.hess = [k](double x) { return 2.0 * k * (1.0 - 2.0 * x * x) * std::exp(-x * x); };
    p.alpha = -4.0 * k * std::exp(-1.5);  // minimum of hess, attained at x^2 = 3/2
    p.sup_abs = k;
    p.family = PotentialFamily::gauss_well;
    return p;
  }
  throw std::invalid_argument("builtin: unknown potential '" + name + "'");
}

DoublingReport check_doubling(const PotentialSpec& p, double lo, double hi, int n) {
  if (n < 2 || hi <= lo) throw std::invalid_argument("check_doubling: bad lattice");
  const double dx = (hi - lo) / (n - 1);
  std::vector<double> xs(n), vs(n);
  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + i * dx;
    vs[i] = p.value(xs[i]);
    vmin = std::min(vmin, vs[i]);
  }

  DoublingReport rep;
  double shift = 0.0;
  // If 1 + V(x) + V(y) can be <= 0 the raw inequality is meaningless; report the
  // constant for the shifted potential V - min V instead.
  if (1.0 + 2.0 * vmin <= 0.0) {
    rep.holds = false;
    rep.shifted = true;
    shift = -vmin;
  } else {
    rep.holds = true;
  }

  double c = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double num = p.value(xs[i] + xs[j]) + shift;
      const double den = 1.0 + (vs[i] + shift) + (vs[j] + shift);
      if (num > 0.0) c = std::max(c, num / den);
    }
  }
  rep.c = c;
  return rep;
}

PairScanReport check_uniform_convexity_outside(const PotentialSpec& p, double k_out,
                                               double r_out, double lo, double hi, int n) {
  if (n < 2 || hi <= lo) throw std::invalid_argument("check_uniform_convexity_outside: bad lattice");
  if (k_out <= 0.0 || r_out < 0.0)
    throw std::invalid_argument("check_uniform_convexity_outside: need K > 0, R >= 0");
  const double dx = (hi - lo) / (n - 1);
  std::vector<double> xs(n), gs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + i * dx;
    gs[i] = p.grad(xs[i]);
  }

  PairScanReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  const double third = k_out / 3.0;
#pragma omp parallel
  {
    PairScanReport local = rep;
#pragma omp for schedule(static) nowait
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (std::abs(xs[i]) < 2.0 * r_out && std::abs(xs[j]) < 2.0 * r_out) continue;
        const double d = xs[i] - xs[j];
        const double slack = (gs[i] - gs[j]) * d - third * d * d;
        if (slack < local.worst_slack) {
          local.worst_slack = slack;
          local.worst_x = xs[i];
          local.worst_y = xs[j];
        }
      }
    }
#pragma omp critical
    {
      if (local.worst_slack < rep.worst_slack) rep = local;
    }
  }
  rep.holds = rep.worst_slack >= -1e-12;
  return rep;
}

PairScanReport check_degenerate_convexity(const PotentialSpec& p, double pow_p, double c_deg,
                                          const std::vector<double>& eps_list, double lo,
                                          double hi, int n) {
  if (n < 2 || hi <= lo) throw std::invalid_argument("check_degenerate_convexity: bad lattice");
  if (pow_p <= 0.0 || c_deg <= 0.0 || eps_list.empty())
    throw std::invalid_argument("check_degenerate_convexity: need p, c_deg > 0 and eps values");
  for (double e : eps_list)
    if (e <= 0.0) throw std::invalid_argument("check_degenerate_convexity: eps must be > 0");
  const double dx = (hi - lo) / (n - 1);
  std::vector<double> xs(n), gs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + i * dx;
    gs[i] = p.grad(xs[i]);
  }
  std::vector<double> eps_pow(eps_list.size());
  for (size_t k = 0; k < eps_list.size(); ++k) eps_pow[k] = std::pow(eps_list[k], pow_p);

  PairScanReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
#pragma omp parallel
  {
    PairScanReport local = rep;
#pragma omp for schedule(static) nowait
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double d = xs[j] - xs[i];
        const double lhs = (gs[j] - gs[i]) * d;
        for (size_t k = 0; k < eps_list.size(); ++k) {
          const double slack = lhs - c_deg * eps_pow[k] * (d * d - eps_list[k] * eps_list[k]);
          if (slack < local.worst_slack) {
            local.worst_slack = slack;
            local.worst_x = xs[i];
            local.worst_y = xs[j];
          }
        }
      }
    }
#pragma omp critical
    {
      if (local.worst_slack < rep.worst_slack) rep = local;
    }
  }
  rep.holds = rep.worst_slack >= -1e-12;
  return rep;
}

DerivativeCheck verify_derivatives(const PotentialSpec& p, double lo, double hi, int n,
                                   double step) {
  if (n < 1 || hi <= lo) throw std::invalid_argument("verify_derivatives: bad lattice");
  DerivativeCheck chk;
  const double h = step;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (i + 0.5) * (hi - lo) / n;
    const double fd_g = (p.value(x + h) - p.value(x - h)) / (2.0 * h);
    const double fd_h = (p.grad(x + h) - p.grad(x - h)) / (2.0 * h);
    const double eg = std::abs(fd_g - p.grad(x)) / std::max(1.0, std::abs(p.grad(x)));
    const double eh = std::abs(fd_h - p.hess(x)) / std::max(1.0, std::abs(p.hess(x)));
    chk.max_rel_grad = std::max(chk.max_rel_grad, eg);
    chk.max_rel_hess = std::max(chk.max_rel_hess, eh);
  }
  return chk;
}

}  // namespace granular
