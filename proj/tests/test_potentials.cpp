#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "granular/potentials.hpp"

using namespace granular;

TEST_CASE("catalog derivatives are consistent") {
  for (const auto& name : {"quadratic", "power_abs", "cubic_abs", "double_well", "pseudo_huber",
                           "gauss_well"}) {
    std::vector<double> params;
    if (std::string(name) == "quadratic") params = {1.5};
    if (std::string(name) == "power_abs") params = {0.5};
    if (std::string(name) == "double_well") params = {0.3};
    if (std::string(name) == "gauss_well") params = {0.2};
    const PotentialSpec p = builtin(name, params);
    const DerivativeCheck chk = verify_derivatives(p, -5.0, 5.0, 400);
    CAPTURE(name);
    CHECK(chk.max_rel_grad < 1e-6);
    CHECK(chk.max_rel_hess < 1e-6);
  }
}

TEST_CASE("convexity moduli of the catalog") {
  CHECK(builtin("quadratic", {2.0}).alpha == doctest::Approx(2.0));
  CHECK(builtin("double_well", {0.3}).alpha == doctest::Approx(-0.6));
  // min of the gauss-well Hessian sits at x^2 = 3/2
  const PotentialSpec g = builtin("gauss_well", {0.1});
  CHECK(g.alpha == doctest::Approx(-0.08925206405937193).epsilon(1e-14));
  double hmin = 1e300;
  for (int i = 0; i < 4000; ++i) hmin = std::min(hmin, g.hess(-4.0 + i * 8.0 / 4000));
  CHECK(hmin >= g.alpha - 1e-12);
  CHECK(hmin == doctest::Approx(g.alpha).epsilon(1e-5));
  CHECK(*g.sup_abs == doctest::Approx(0.1));
}

TEST_CASE("doubling constants on the [-5,5] lattice") {
  const DoublingReport quad = check_doubling(builtin("quadratic", {1.0}), -5.0, 5.0, 201);
  CHECK(quad.holds);
  CHECK_FALSE(quad.shifted);
  CHECK(quad.c == doctest::Approx(25.0 / 13.0).epsilon(1e-12));  // at x = y = 5

  const DoublingReport cubic = check_doubling(builtin("cubic_abs"), -5.0, 5.0, 201);
  CHECK(cubic.holds);
  CHECK(cubic.c == doctest::Approx(1000.0 / 251.0).epsilon(1e-12));

  // deep well: 1 + V(x) + V(y) crosses zero, constant only meaningful shifted
  const DoublingReport well = check_doubling(builtin("gauss_well", {1.0}), -5.0, 5.0, 201);
  CHECK_FALSE(well.holds);
  CHECK(well.shifted);
}

TEST_CASE("uniform convexity outside a ball for the cubic potential") {
  const PotentialSpec p = builtin("cubic_abs");
  REQUIRE(p.outside_kr.has_value());
  CHECK(p.outside_kr->first == doctest::Approx(6.0));
  CHECK(p.outside_kr->second == doctest::Approx(1.0));

  CHECK(check_uniform_convexity_outside(p, 6.0, 1.0, -8.0, 8.0, 321).holds);
  // min of (grad(x)-grad(y))(x-y)/|x-y|^2 over max(|x|,|y|) >= 2 is 12(sqrt(2)-1)
  // ~ 4.9706 at (2, 2-2*sqrt(2)), so K/3 stays admissible up to K ~ 14.9
  CHECK(check_uniform_convexity_outside(p, 14.0, 1.0, -8.0, 8.0, 321).holds);
  const PairScanReport fail = check_uniform_convexity_outside(p, 19.0, 1.0, -8.0, 8.0, 321);
  CHECK_FALSE(fail.holds);
  CHECK(std::abs(fail.worst_x) + std::abs(fail.worst_y) > 0.0);

  const PotentialSpec q = builtin("quadratic", {1.0});
  CHECK(check_uniform_convexity_outside(q, 1.0, 0.0, -5.0, 5.0, 101).holds);
  CHECK_FALSE(check_uniform_convexity_outside(q, 4.0, 0.0, -5.0, 5.0, 101).holds);
}

TEST_CASE("degenerate convexity envelope for the cubic potential") {
  // For W' = 3x|x| the slack c eps (d^2 - eps^2) <= 1.5 d^3 is tight at
  // c = 1.5 sqrt(729/48) ~ 3.897 (worst pair symmetric, d = (4/9) c eps).
  const PotentialSpec p = builtin("cubic_abs");
  const std::vector<double> eps = {0.25, 0.5, 1.0, 2.0};
  CHECK(check_degenerate_convexity(p, 1.0, 0.5, eps, -5.0, 5.0, 201).holds);
  CHECK(check_degenerate_convexity(p, 1.0, 2.0, eps, -5.0, 5.0, 201).holds);
  CHECK_FALSE(check_degenerate_convexity(p, 1.0, 4.5, eps, -5.0, 5.0, 201).holds);
}

TEST_CASE("pseudo-huber gradient is bounded by one") {
  const PotentialSpec p = builtin("pseudo_huber");
  for (int i = 0; i <= 100; ++i) {
    const double x = -50.0 + i;
    CHECK(std::abs(p.grad(x)) <= 1.0);
  }
  CHECK(p.alpha == 0.0);
}

TEST_CASE("catalog rejects bad arguments") {
  CHECK_THROWS_AS((void)builtin("quadratic", {}), std::invalid_argument);
  CHECK_THROWS_AS((void)builtin("quadratic", {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)builtin("no_such_potential"), std::invalid_argument);
  CHECK_THROWS_AS((void)check_doubling(builtin("zero"), 5.0, -5.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(
      (void)check_degenerate_convexity(builtin("cubic_abs"), 1.0, 0.5, {}, -5.0, 5.0, 100),
      std::invalid_argument);
}
