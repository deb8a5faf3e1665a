// End-to-end acceptance suite: one pass/fail line per criterion, tolerances
// pinned in code. Returns the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "granular/dynamics.hpp"
#include "granular/measure.hpp"
#include "granular/potentials.hpp"
#include "granular/rate_fit.hpp"
#include "granular/stationary.hpp"
#include "granular/transport.hpp"

using namespace granular;

namespace {

int g_failures = 0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void report(int id, const char* label, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s -- %s\n", pass ? "PASS" : "FAIL", id, label,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double l1_distance(const GridMeasure& a, const GridMeasure& b) {
  double d = 0.0;
  for (int i = 0; i < a.m(); ++i) d += std::abs(a.density()[i] - b.density()[i]) * a.dx();
  return d;
}

double max_mean_drift(const TrajectoryRecord& traj) {
  double worst = 0.0;
  for (double m : traj.mean) worst = std::max(worst, std::abs(m - traj.mean.front()));
  return worst;
}

struct EnvelopeCheck {
  bool ok = true;
  double worst = 0.0;  // max ratio value / bound over checked samples
};

EnvelopeCheck exponential_envelope(const std::vector<double>& t, const std::vector<double>& v,
                                   double rate, double slack, double floor_v) {
  EnvelopeCheck e;
  for (size_t k = 0; k < t.size(); ++k) {
    if (!(v[k] >= floor_v)) continue;
    const double bound = v[0] * std::exp(-rate * (t[k] - t[0])) * (1.0 + slack);
    e.worst = std::max(e.worst, v[k] / bound);
    if (v[k] > bound) e.ok = false;
  }
  return e;
}

}  // namespace

int main() {
  const auto wall0 = std::chrono::steady_clock::now();
  std::printf("acceptance suite: mean-field gradient-flow laboratory\n");

  const PotentialSpec zero = builtin("zero");
  const PotentialSpec vq = builtin("quadratic", {1.0});
  const PotentialSpec wq = builtin("quadratic", {1.0});
  const PotentialSpec cubic = builtin("cubic_abs");

  RunDiagnostics all_diag;          // merged over every grid run below
  double worst_mean_drift = 0.0;    // over runs with V = 0

  // ------------------------------------------------------------------ 1
  {
    const auto t0 = std::chrono::steady_clock::now();
    SolverConfig cfg;  // [-12,12], m=800, dt=1e-4
    cfg.t_end = 3.0;
    cfg.record_every = 100;
    const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 2.0, 2.0);
    const GridMeasure limit = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.0, 1.0);
    const SolveResult r = pde_solve(mu0, vq, zero, cfg, &limit);
    all_diag.merge(r.diag);
    double worst_rel = 0.0;
    for (size_t k = 0; k < r.traj.t.size(); ++k) {
      const double t = r.traj.t[k];
      if (t < 0.1 || t > 3.0) continue;
      const double mt = 2.0 * std::exp(-t);
      const double st = std::sqrt(1.0 + 3.0 * std::exp(-2.0 * t));
      const double cf = std::sqrt(mt * mt + (st - 1.0) * (st - 1.0));
      worst_rel = std::max(worst_rel, std::abs(r.traj.w2[k] - cf) / cf);
    }
    const double secs = seconds_since(t0);
    report(1, "closed-form relaxation oracle", worst_rel < 0.02 && secs < 30.0,
           fmt("worst W2 rel err %.2e (tol 2e-2) in %.1f s (limit 30 s)", worst_rel, secs));
  }

  // ------------------------------------------------------------------ 2
  CoupledResult pair_quad = [&] {
    SolverConfig cfg;
    cfg.lo = -40.0;
    cfg.hi = 40.0;
    cfg.m = 1600;
    cfg.dt = 1e-4;
    cfg.t_end = 0.3;
    cfg.record_every = 100;
    const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.0, 5.0);
    const GridMeasure nu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.0, 6.0);
    return coupled_dissipation_run(mu0, nu0, vq, wq, cfg);
  }();
  all_diag.merge(pair_quad.diag);
  {
    const RateReport fit = fit_exponential(pair_quad.traj.t, pair_quad.traj.w2, 0.02, 0.30);
    const EnvelopeCheck env =
        exponential_envelope(pair_quad.traj.t, pair_quad.traj.w2, 2.0, 0.02, 0.0);
    const bool pass = fit.lambda_fit >= 1.9 && fit.lambda_fit <= 2.1 && env.ok;
    report(2, "exponential pair contraction at rate alpha+beta", pass,
           fmt("rate %.4f (need [1.9,2.1], r^2 %.5f), envelope worst %.3f of bound",
               fit.lambda_fit, fit.r_squared, env.worst));
  }

  // shared cubic steady state (criteria 3, 6, 7)
  const StationaryState stat_cubic = fixed_point_solve(zero, cubic, -14.0, 14.0, 1400, 0.0);

  // ------------------------------------------------------------------ 3
  std::vector<SolveResult> cubic_runs;
  {
    SolverConfig cfg;
    cfg.lo = -14.0;
    cfg.hi = 14.0;
    cfg.m = 1400;
    cfg.dt = 2e-4;
    cfg.t_end = 1.5;
    cfg.record_every = 100;
    std::vector<GridMeasure> data;
    for (double s : {0.3, 0.5, 1.0, 2.0})
      data.push_back(GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.0, s));
    data.push_back(GridMeasure::bimodal(cfg.lo, cfg.hi, cfg.m, 1.5, 0.3));

    double bound = 0.0;
    for (double r_out : {0.5, 1.0, 2.0})
      bound = std::max(bound,
                       wj_constant(6.0 * r_out, r_out, hyp_u_constant(stat_cubic.mu, r_out), 1));

    std::vector<double> rates;
    bool rates_ok = true;
    for (const GridMeasure& mu0 : data) {
      cubic_runs.push_back(pde_solve(mu0, zero, cubic, cfg, &stat_cubic.mu));
      const SolveResult& r = cubic_runs.back();
      all_diag.merge(r.diag);
      worst_mean_drift = std::max(worst_mean_drift, max_mean_drift(r.traj));
      const auto [wlo, whi] = default_fit_window(r.traj.t, r.traj.w2, 1e-7);
      const RateReport fit = fit_exponential(r.traj.t, r.traj.w2, wlo, whi);
      rates.push_back(fit.lambda_fit);
      rates_ok = rates_ok && fit.lambda_fit > 0.0 && fit.lambda_fit >= bound * 0.95;
    }
    double c_fit = rates[0];
    for (double r : rates) c_fit = std::min(c_fit, r);
    bool env_ok = true;
    double env_worst = 0.0;
    for (const SolveResult& r : cubic_runs) {
      const EnvelopeCheck env =
          exponential_envelope(r.traj.t, r.traj.w2, c_fit, 0.02, 1e-8);
      env_ok = env_ok && env.ok;
      env_worst = std::max(env_worst, env.worst);
    }
    report(3, "uniform convergence to the cubic-interaction steady state",
           rates_ok && env_ok,
           fmt("rates [%.2f..%.2f] vs lower bound %.4f-5%%, common envelope worst %.3f",
               c_fit, *std::max_element(rates.begin(), rates.end()), bound, env_worst));
  }

  // ------------------------------------------------------------------ 4
  CoupledResult pair_cubic = [&] {
    SolverConfig cfg;
    cfg.lo = -14.0;
    cfg.hi = 14.0;
    cfg.m = 1400;
    cfg.dt = 2e-4;
    cfg.t_end = 1.5;
    cfg.record_every = 100;
    const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.0, 0.5);
    const GridMeasure nu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.0, 2.0);
    return coupled_dissipation_run(mu0, nu0, zero, cubic, cfg);
  }();
  all_diag.merge(pair_cubic.diag);
  worst_mean_drift = std::max(worst_mean_drift, max_mean_drift(pair_cubic.traj));
  {
    const double c_env = degenerate_envelope_constant(1.0, 0.5);
    std::vector<double> tf, vf;
    for (size_t k = 0; k < pair_cubic.traj.t.size(); ++k)
      if (pair_cubic.traj.w2[k] > 1e-12) {
        tf.push_back(pair_cubic.traj.t[k]);
        vf.push_back(pair_cubic.traj.w2[k]);
      }
    const EnvelopeFit env = fit_polynomial_envelope(tf, vf, 1.0, 0.95 * c_env);
    report(4, "polynomial pair contraction under degenerate convexity", env.holds,
           fmt("envelope constant %.3f fitted vs %.4f required (0.95 x %.7f)", env.c_fit,
               0.95 * c_env, c_env));
  }

  // ------------------------------------------------------------------ 5
  {
    SolverConfig cfg;
    cfg.lo = -10.0;
    cfg.hi = 10.0;
    cfg.m = 800;
    cfg.dt = 2e-4;
    cfg.t_end = 0.4;
    cfg.record_every = 50;
    const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, -1.0, 0.5);
    const GridMeasure nu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 1.0, 0.5);
    const CoupledResult dw =
        coupled_dissipation_run(mu0, nu0, builtin("double_well", {0.2}), cubic, cfg);
    all_diag.merge(dw.diag);
    // dedicated short-horizon cubic pair: past t ~ 0.5 the long run of
    // criterion 4 has pair separation far below one grid cell, where the
    // discrete W2/J correspondence cannot be expected to hold
    const CoupledResult pc = [&] {
      SolverConfig c2;
      c2.lo = -14.0;
      c2.hi = 14.0;
      c2.m = 1400;
      c2.dt = 2e-4;
      c2.t_end = 0.3;
      c2.record_every = 50;
      const GridMeasure a = GridMeasure::gaussian(c2.lo, c2.hi, c2.m, 0.0, 0.5);
      const GridMeasure b = GridMeasure::gaussian(c2.lo, c2.hi, c2.m, 0.0, 2.0);
      return coupled_dissipation_run(a, b, zero, cubic, c2);
    }();
    all_diag.merge(pc.diag);
    const double f1 = pair_quad.dissipation_ok_fraction;
    const double f2 = pc.dissipation_ok_fraction;
    const double f3 = dw.dissipation_ok_fraction;
    report(5, "pair dissipation inequality on three potential pairs",
           f1 >= 0.95 && f2 >= 0.95 && f3 >= 0.95,
           fmt("ok fractions %.3f / %.3f / %.3f (need >= 0.95 each)", f1, f2, f3));
  }

  // ------------------------------------------------------------------ 6
  {
    struct Case {
      const char* label;
      StationaryState s;
      PotentialSpec v, w;
    };
    std::vector<Case> cases;
    cases.push_back({"quadratic", fixed_point_solve(vq, zero, -12.0, 12.0, 800), vq, zero});
    cases.push_back(
        {"self-quadratic", fixed_point_solve(zero, wq, -12.0, 12.0, 800, 0.0), zero, wq});
    cases.push_back({"self-cubic", stat_cubic, zero, cubic});
    const PotentialSpec dwell = builtin("double_well", {0.2});
    cases.push_back(
        {"double-well+cubic", fixed_point_solve(dwell, cubic, -10.0, 10.0, 800), dwell, cubic});

    bool pass = true;
    std::string detail;
    for (const Case& c : cases) {
      const double dt = 1e-4;
      const double step_l1 = l1_distance(pde_step(c.s.mu, c.v, c.w, dt), c.s.mu);
      const bool ok = c.s.residual_inf < 1e-6 && step_l1 < 1e-6 * dt;
      pass = pass && ok;
      detail += fmt("%s[res %.1e, step %.1e]%s", c.label, c.s.residual_inf, step_l1 / dt,
                    &c == &cases.back() ? "" : " ");
    }
    report(6, "steady states satisfy the fixed-point identity and the scheme", pass, detail);
  }

  // ------------------------------------------------------------------ 7
  {
    const double m_hat = hyp_u_constant(stat_cubic.mu, 1.0);
    const double bound = wj_constant(6.0, 1.0, m_hat, 1);
    const WjProbeReport rep = wj_probe(stat_cubic.mu, zero, cubic, 1000, 20240817, true);
    int violations = 0;
    for (const ProbeRow& r : rep.rows)
      if (r.ratio < bound) ++violations;
    report(7, "probe lower bound on dissipation/distance at the cubic steady state",
           rep.min_ratio >= bound && violations == 0,
           fmt("min ratio %.4f over %zu probes vs bound %.4f (M-hat %.4f), %d below",
               rep.min_ratio, rep.rows.size(), bound, m_hat, violations));
  }

  // ------------------------------------------------------------------ 8
  {
    const GridMeasure mu = GridMeasure::gaussian(-12.0, 12.0, 800, 0.0, 1.0);
    const std::vector<double> ms = {1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
    const std::vector<double> r = translation_probe(mu, builtin("pseudo_huber"), ms);
    bool decreasing = true;
    for (size_t i = 1; i < r.size(); ++i) decreasing = decreasing && r[i] < r[i - 1];
    // r(M)*M tends to sup V' - int V' dmu = 1 from below; 2 = osc(V') is the
    // a-priori ceiling. A vanishing r(M) with r(M)*M bounded certifies that no
    // uniform probe constant exists for this confinement.
    bool product_ok = true;
    for (size_t i = 0; i < ms.size(); ++i)
      if (ms[i] >= 10.0) product_ok = product_ok && r[i] * ms[i] > 0.0 && r[i] * ms[i] <= 2.0;
    report(8, "translation probes defeat any uniform bound for bounded-slope confinement",
           decreasing && r.back() < 0.05 && product_ok,
           fmt("r(1) %.4f .. r(50) %.4f (< 0.05), r*M in (0,2] for M>=10: %s", r.front(),
               r.back(), product_ok ? "yes" : "no"));
  }

  // ------------------------------------------------------------------ 9
  {
    const GridMeasure gauss = GridMeasure::gaussian(-12.0, 12.0, 800, 0.0, 1.0);
    const WjProbeReport rep = wj_probe(gauss, vq, zero, 1000, 7, false);
    const bool probe_ok = rep.min_ratio >= 0.99;

    const PotentialSpec gwell = builtin("gauss_well", {0.1});
    const double c_ref = perturbed_reference_rate(1.0, 1.0, gwell.alpha, *gwell.sup_abs);
    const StationaryState stat = fixed_point_solve(vq, gwell, -12.0, 12.0, 600);
    SolverConfig cfg;
    cfg.m = 600;
    cfg.dt = 2e-4;
    cfg.t_end = 2.5;
    cfg.record_every = 250;
    const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 2.0, 1.0);
    const SolveResult r = pde_solve(mu0, vq, gwell, cfg, &stat.mu);
    all_diag.merge(r.diag);
    const RateReport fit = fit_exponential(r.traj.t, r.traj.w2, 0.2, 2.0);
    const bool rate_ok = fit.lambda_fit >= 0.95 * c_ref;
    report(9, "contraction rate survives a bounded interaction perturbation",
           probe_ok && rate_ok,
           fmt("probe min ratio %.4f (>= 0.99), fitted rate %.4f vs reference %.4f-5%%",
               rep.min_ratio, fit.lambda_fit, c_ref));
  }

  // ------------------------------------------------------------------ 10
  {
    SolverConfig cfg;
    cfg.lo = -14.0;
    cfg.hi = 14.0;
    cfg.m = 1400;
    cfg.dt = 2e-4;
    cfg.t_end = 1.0;
    cfg.record_every = 1000;
    const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.0, 1.0);
    const SolveResult pde = pde_solve(mu0, zero, cubic, cfg);
    all_diag.merge(pde.diag);
    worst_mean_drift = std::max(worst_mean_drift, max_mean_drift(pde.traj));

    double sum_big = 0.0, sum_small = 0.0;
    for (std::uint64_t seed : {101, 102, 103, 104, 105}) {
      const ParticleEnsemble big = particle_solve(sample_from_grid(mu0, 20000, seed), zero,
                                                  cubic, 1e-3, 1.0);
      const ParticleEnsemble small = particle_solve(sample_from_grid(mu0, 1000, seed ^ 0xabcd),
                                                    zero, cubic, 1e-3, 1.0);
      sum_big += wasserstein2(particles_to_grid(big, cfg.lo, cfg.hi, cfg.m), pde.state);
      sum_small += wasserstein2(particles_to_grid(small, cfg.lo, cfg.hi, cfg.m), pde.state);
    }
    const double mean_big = sum_big / 5.0, mean_small = sum_small / 5.0;
    report(10, "interacting particles converge to the grid solution",
           mean_big < 0.05 && mean_big < mean_small,
           fmt("mean W2 %.4f at N=20000 (< 0.05) vs %.4f at N=1000", mean_big, mean_small));
  }

  // ------------------------------------------------------------------ 11
  {
    SolverConfig cfg;
    cfg.lo = -14.0;
    cfg.hi = 14.0;
    cfg.m = 1400;
    cfg.dt = 1e-3;
    cfg.t_end = 5.0;
    cfg.record_every = 100;
    const GridMeasure mu0 = GridMeasure::bimodal(cfg.lo, cfg.hi, cfg.m, 1.5, 0.3);
    const SolveResult r = pde_solve(mu0, zero, cubic, cfg);
    all_diag.merge(r.diag);
    worst_mean_drift = std::max(worst_mean_drift, max_mean_drift(r.traj));

    const bool mass_ok = all_diag.max_mass_drift < 1e-12;
    const bool mean_ok = worst_mean_drift < 1e-7;
    const bool energy_ok = all_diag.max_step_energy_increase < 1e-8;
    report(11, "conservation suite across every run above",
           mass_ok && mean_ok && energy_ok,
           fmt("mass drift %.1e (<1e-12), mean drift %.1e (<1e-7, V=0 over [0,5]), "
               "energy increase %.1e (<1e-8)",
               all_diag.max_mass_drift, worst_mean_drift,
               all_diag.max_step_energy_increase));
  }

  std::printf("%d of 11 criteria failed; total wall time %.1f s\n", g_failures,
              seconds_since(wall0));
  return g_failures;
}
