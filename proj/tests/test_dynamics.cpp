#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "granular/dynamics.hpp"
#include "granular/stationary.hpp"
#include "granular/transport.hpp"

using namespace granular;

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.validate();  // defaults are fine
  SolverConfig bad = cfg;
  bad.dt = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.m = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.hi = bad.lo;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  // explicit scheme: diffusion stability bound dt <= 0.45 dx^2
  bad = cfg;
  bad.scheme = Scheme::explicit_euler;
  bad.dt = bad.dx() * bad.dx();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.dt = 0.4 * bad.dx() * bad.dx();
  bad.validate();
}

TEST_CASE("ornstein-uhlenbeck relaxation of mean and variance") {
  // d mean/dt = -mean, variance relaxes to 1 (and starts there)
  SolverConfig cfg;
  cfg.t_end = 0.5;
  cfg.record_every = 1000;
  const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 1.0, 1.0);
  const SolveResult r = pde_solve(mu0, builtin("quadratic", {1.0}), builtin("zero"), cfg);
  CHECK(r.state.mean() == doctest::Approx(std::exp(-0.5)).epsilon(1e-3));
  const double var = r.state.second_moment() - r.state.mean() * r.state.mean();
  CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.state.is_normalized(1e-10));
  CHECK(r.diag.max_mass_drift < 1e-12);       // flux form conserves mass exactly
  CHECK(r.diag.max_step_energy_increase <= 1e-10);
  CHECK_FALSE(r.diag.flagged);
  // records: step 0, every 1000 steps, final
  REQUIRE(r.traj.t.size() == 6);
  CHECK(r.traj.t.front() == 0.0);
  CHECK(r.traj.t.back() == doctest::Approx(0.5));
  CHECK(r.traj.mean.front() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solved stationary profiles are fixed points of both schemes") {
  const PotentialSpec v = builtin("quadratic", {1.0});
  const PotentialSpec w = builtin("zero");
  const StationaryState s = fixed_point_solve(v, w, -12.0, 12.0, 400);
  for (Scheme scheme : {Scheme::semi_implicit, Scheme::explicit_euler}) {
    const double dt = scheme == Scheme::explicit_euler ? 0.4 * s.mu.dx() * s.mu.dx() : 1e-4;
    const GridMeasure next = pde_step(s.mu, v, w, dt, scheme);
    double l1 = 0.0;
    for (int i = 0; i < s.mu.m(); ++i)
      l1 += std::abs(next.density()[i] - s.mu.density()[i]) * s.mu.dx();
    CHECK(l1 / dt < 1e-6);
  }
}

TEST_CASE("positivity under sharp initial data") {
  SolverConfig cfg;
  cfg.lo = -6.0;
  cfg.hi = 6.0;
  cfg.m = 300;
  cfg.dt = 2e-4;
  cfg.t_end = 0.05;
  const GridMeasure mu0 = GridMeasure::uniform(cfg.lo, cfg.hi, cfg.m, -0.1, 0.1);
  const SolveResult r =
      pde_solve(mu0, builtin("double_well", {0.5}), builtin("cubic_abs"), cfg);
  for (double d : r.state.density()) CHECK(d >= 0.0);
  CHECK(r.diag.clamped_mass <= 1e-9);
  CHECK(r.state.is_normalized(1e-10));
}

TEST_CASE("centre of mass is conserved without confinement") {
  SolverConfig cfg;
  cfg.m = 600;
  cfg.dt = 2e-4;
  cfg.t_end = 0.5;
  cfg.record_every = 500;
  const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.5, 1.0);
  const SolveResult r = pde_solve(mu0, builtin("zero"), builtin("quadratic", {1.0}), cfg);
  CHECK(r.state.mean() == doctest::Approx(0.5).epsilon(2e-7));
  for (double m : r.traj.mean) CHECK(std::abs(m - 0.5) < 1e-7);
}

TEST_CASE("boundary mass flags the run") {
  SolverConfig cfg;
  cfg.lo = -4.0;
  cfg.hi = 4.0;
  cfg.m = 200;
  cfg.t_end = 0.01;
  const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 3.0, 1.0);
  const SolveResult r = pde_solve(mu0, builtin("zero"), builtin("zero"), cfg);
  CHECK(r.diag.max_boundary_density > 1e-10);
  CHECK(r.diag.flagged);
}

TEST_CASE("explicit and semi-implicit schemes agree at small dt") {
  SolverConfig cfg;
  cfg.lo = -6.0;
  cfg.hi = 6.0;
  cfg.m = 150;
  cfg.dt = 0.4 * cfg.dx() * cfg.dx();
  cfg.t_end = 200 * cfg.dt;
  cfg.record_every = 1000;
  const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.5, 0.8);
  const auto gap_at = [&](double dt) {
    SolverConfig ci = cfg;
    ci.dt = dt;
    SolverConfig ce = ci;
    ce.scheme = Scheme::explicit_euler;
    const SolveResult a = pde_solve(mu0, builtin("quadratic", {1.0}), builtin("zero"), ci);
    const SolveResult b = pde_solve(mu0, builtin("quadratic", {1.0}), builtin("zero"), ce);
    double l1 = 0.0;
    for (int i = 0; i < cfg.m; ++i)
      l1 += std::abs(a.state.density()[i] - b.state.density()[i]) * cfg.dx();
    return l1;
  };
  const double g1 = gap_at(cfg.dt);
  const double g2 = gap_at(0.5 * cfg.dt);
  CHECK(g1 < 1e-3);            // same flux, so the schemes only differ at O(dt)
  CHECK(g1 / g2 == doctest::Approx(2.0).epsilon(0.1));  // first-order gap halves with dt
}

TEST_CASE("particle integrator fast paths match the generic force evaluation") {
  const GridMeasure mu = GridMeasure::gaussian(-8.0, 8.0, 400, 0.0, 1.0);
  const PotentialSpec v = builtin("quadratic", {1.0});
  const PotentialSpec w_fast = builtin("quadratic", {0.7});
  PotentialSpec w_generic = w_fast;
  w_generic.family = PotentialFamily::custom;

  ParticleEnsemble pa = sample_from_grid(mu, 400, 33);
  ParticleEnsemble pb = sample_from_grid(mu, 400, 33);
  for (int k = 0; k < 20; ++k) {
    particle_step(pa, v, w_fast, 1e-3);
    particle_step(pb, v, w_generic, 1e-3);  // same noise stream, same seed
  }
  for (size_t i = 0; i < pa.positions.size(); ++i)
    CHECK(pa.positions[i] == doctest::Approx(pb.positions[i]).epsilon(1e-10));
  CHECK(pa.time == doctest::Approx(0.02));
}

TEST_CASE("particle system contracts toward the mean-field law") {
  // V = 0, W = x^2/2: the law converges to a unit gaussian around the initial mean
  const GridMeasure mu0 = GridMeasure::gaussian(-10.0, 10.0, 500, 0.0, 2.0);
  ParticleEnsemble p = sample_from_grid(mu0, 5000, 11);
  p = particle_solve(std::move(p), builtin("zero"), builtin("quadratic", {1.0}), 1e-3, 2.0);
  CHECK(p.time == doctest::Approx(2.0));
  const GridMeasure law = particles_to_grid(p, -10.0, 10.0, 200);
  const GridMeasure target = GridMeasure::gaussian(-10.0, 10.0, 200, p.mean(), 1.0);
  CHECK(wasserstein2(law, target) < 0.1);
}

TEST_CASE("coupled runs report contraction and dissipation") {
  SolverConfig cfg;
  cfg.lo = -15.0;
  cfg.hi = 15.0;
  cfg.m = 600;
  cfg.dt = 2e-4;
  cfg.t_end = 0.1;
  cfg.record_every = 50;
  const GridMeasure mu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.0, 1.5);
  const GridMeasure nu0 = GridMeasure::gaussian(cfg.lo, cfg.hi, cfg.m, 0.0, 2.0);
  const CoupledResult r =
      coupled_dissipation_run(mu0, nu0, builtin("quadratic", {1.0}), builtin("quadratic", {1.0}),
                              cfg);
  REQUIRE(r.traj.w2_pair_sq.size() == r.traj.t.size());
  REQUIRE(r.traj.j.size() == r.traj.t.size());
  for (size_t k = 1; k < r.traj.w2_pair_sq.size(); ++k)
    CHECK(r.traj.w2_pair_sq[k] < r.traj.w2_pair_sq[k - 1]);
  for (double jv : r.traj.j) CHECK(jv > 0.0);
  CHECK(r.dissipation_ok_fraction >= 0.95);
  CHECK_FALSE(r.diag.flagged);
}
