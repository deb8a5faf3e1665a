#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "doctest.h"
#include "granular/measure.hpp"
#include "granular/transport.hpp"

using namespace granular;

namespace {
const double kPi = 3.14159265358979323846;

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_CASE("gaussian grid moments and entropy") {
  const GridMeasure mu = GridMeasure::gaussian(-12.0, 12.0, 800, 0.0, 1.0);
  CHECK(mu.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mu.mean() == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(mu.second_moment() == doctest::Approx(1.0).epsilon(1e-10));
  // midpoint-rule entropy of N(0,1) matches -0.5*log(2*pi*e) to machine precision
  const double ent = free_energy(mu, builtin("zero"), builtin("zero"));
  CHECK(ent == doctest::Approx(-0.5 * std::log(2.0 * kPi * std::exp(1.0))).epsilon(1e-13));
  CHECK(ent == doctest::Approx(-1.4189385332046727).epsilon(1e-13));
}

TEST_CASE("uniform and bimodal factories") {
  const GridMeasure u = GridMeasure::uniform(-2.0, 2.0, 400, 0.0, 1.0);
  CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.mean() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(u.quantile(0.25) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(u.quantile(0.75) == doctest::Approx(0.75).epsilon(1e-9));

  const GridMeasure b = GridMeasure::bimodal(-10.0, 10.0, 500, 1.5, 0.3);
  CHECK(b.mass() == doctest::Approx(1.0).epsilon(1e-12));
  const auto& rho = b.density();
  const double peak = *std::max_element(rho.begin(), rho.end());
  for (int i = 0; i < b.m(); ++i)  // even up to roundoff in the cell centres
    CHECK(std::abs(rho[i] - rho[b.m() - 1 - i]) <= 1e-12 * peak);
  CHECK(b.mean() == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(b.second_moment() == doctest::Approx(1.5 * 1.5 + 0.3 * 0.3).epsilon(1e-6));
}

TEST_CASE("cdf and quantile are inverse on the bulk") {
  const GridMeasure mu = GridMeasure::gaussian(-8.0, 8.0, 400, 0.5, 1.2);
  const auto cdf = mu.cdf_edges();
  REQUIRE(cdf.size() == size_t(mu.m() + 1));
  CHECK(cdf.front() == 0.0);
  CHECK(cdf.back() == doctest::Approx(1.0).epsilon(1e-12));
  for (size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i] >= cdf[i - 1]);
  for (double u : {0.05, 0.3, 0.5, 0.9}) {
    const double x = mu.quantile(u);
    // re-evaluate the CDF at x by cell interpolation
    double acc = 0.0;
    for (int i = 0; i < mu.m(); ++i) {
      const double l = mu.lo() + i * mu.dx();
      if (x >= l + mu.dx())
        acc += mu.density()[i] * mu.dx();
      else if (x > l) {
        acc += mu.density()[i] * (x - l);
        break;
      } else
        break;
    }
    CHECK(acc == doctest::Approx(u).epsilon(1e-9));
  }
}

TEST_CASE("normalization bookkeeping") {
  GridMeasure mu = GridMeasure::from_function(-1.0, 1.0, 50, [](double) { return 3.0; }, false);
  CHECK(mu.mass() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK_FALSE(mu.is_normalized());
  mu.normalize();
  CHECK(mu.is_normalized(1e-12));
}

TEST_CASE("support connectivity") {
  std::vector<double> rho(100, 0.0);
  for (int i = 20; i < 40; ++i) rho[i] = 1.0;
  GridMeasure mu(-1.0, 1.0, rho);
  CHECK(mu.has_connected_support());
  CHECK(mu.support_range() == std::pair<int, int>(20, 39));
  rho[30] = 0.0;
  GridMeasure hole(-1.0, 1.0, rho);
  CHECK_FALSE(hole.has_connected_support());
}

TEST_CASE("grid csv round trip is exact") {
  const GridMeasure mu = GridMeasure::gaussian(-6.0, 6.0, 173, 0.3, 0.9);
  const auto path = temp_file("granular_grid_rt.csv");
  mu.write_csv(path.string());
  const GridMeasure back = GridMeasure::read_csv(path.string());
  // lo/hi are rebuilt from the printed cell centres, so only ulp-accurate
  CHECK(back.lo() == doctest::Approx(mu.lo()).epsilon(1e-13));
  CHECK(back.hi() == doctest::Approx(mu.hi()).epsilon(1e-13));
  REQUIRE(back.m() == mu.m());
  for (int i = 0; i < mu.m(); ++i) CHECK(back.density()[i] == mu.density()[i]);
  std::filesystem::remove(path);
}

TEST_CASE("particle csv round trip preserves seed and time") {
  ParticleEnsemble p({0.25, -1.5, 3.75}, 424242, 0.625);
  const auto path = temp_file("granular_particles_rt.csv");
  p.write_csv(path.string());
  const ParticleEnsemble back = ParticleEnsemble::read_csv(path.string());
  CHECK(back.seed == p.seed);
  CHECK(back.time == p.time);
  REQUIRE(back.positions.size() == p.positions.size());
  for (size_t i = 0; i < p.positions.size(); ++i) CHECK(back.positions[i] == p.positions[i]);
  std::filesystem::remove(path);
}

TEST_CASE("free energy quadratic fast path equals the generic table route") {
  const GridMeasure mu = GridMeasure::gaussian(-10.0, 10.0, 300, 0.4, 1.1);
  const PotentialSpec v = builtin("quadratic", {1.0});
  const PotentialSpec w_fast = builtin("quadratic", {0.8});
  PotentialSpec w_generic = w_fast;
  w_generic.family = PotentialFamily::custom;  // force the lattice-table path
  const double a = free_energy(mu, v, w_fast);
  const double b = free_energy(mu, v, w_generic);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("pushforward free energy with the identity map") {
  const GridMeasure mu = GridMeasure::gaussian(-10.0, 10.0, 300, -0.5, 0.8);
  const PotentialSpec v = builtin("double_well", {0.2});
  const PotentialSpec w = builtin("cubic_abs");
  const double direct = free_energy(mu, v, w);
  const double pushed = free_energy_pushforward(
      mu, [](double x) { return x; }, [](double) { return 1.0; }, v, w);
  CHECK(pushed == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("pushforward free energy under translation shifts only the potential term") {
  const GridMeasure mu = GridMeasure::gaussian(-10.0, 10.0, 400, 0.0, 1.0);
  const PotentialSpec v = builtin("quadratic", {1.0});
  const PotentialSpec w = builtin("quadratic", {1.0});  // translation-invariant term
  const double delta = 0.7;
  const double f0 = free_energy(mu, v, w);
  const double f1 = free_energy_pushforward(
      mu, [delta](double x) { return x + delta; }, [](double) { return 1.0; }, v, w);
  // int V(x+delta) dmu - int V dmu = delta*mean + delta^2/2 for V = x^2/2
  CHECK(f1 - f0 == doctest::Approx(delta * mu.mean() + 0.5 * delta * delta).epsilon(1e-10));
}

TEST_CASE("sampling and gridding round trip") {
  const GridMeasure mu = GridMeasure::gaussian(-8.0, 8.0, 400, 0.0, 1.0);
  const ParticleEnsemble p = sample_from_grid(mu, 20000, 17);
  REQUIRE(p.positions.size() == 20000);
  const ParticleEnsemble q = sample_from_grid(mu, 20000, 17);
  for (size_t i = 0; i < 100; ++i) CHECK(p.positions[i] == q.positions[i]);  // deterministic

  const GridMeasure back = particles_to_grid(p, -8.0, 8.0, 400);
  CHECK(back.is_normalized(1e-9));
  CHECK(wasserstein2(mu, back) < 0.05);

  ParticleEnsemble far({100.0, 200.0}, 1);
  CHECK_THROWS_AS((void)particles_to_grid(far, -8.0, 8.0, 400), std::runtime_error);
}

TEST_CASE("grid constructor rejects bad input") {
  CHECK_THROWS_AS(GridMeasure(1.0, -1.0, std::vector<double>(10, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(GridMeasure(-1.0, 1.0, {}), std::invalid_argument);
  CHECK_THROWS_AS((void)GridMeasure::gaussian(-1.0, 1.0, 100, 0.0, -2.0), std::invalid_argument);
}
