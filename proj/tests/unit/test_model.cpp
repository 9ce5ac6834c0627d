#include <doctest.h>

#include <cmath>

#include "vasc/errors.hpp"
#include "vasc/model.hpp"

using namespace vasc;

TEST_CASE("canonical parameters give unit margin and sigma") {
  const ModelParams p = canonical_params();
  const Equilibrium eq = make_equilibrium(p, 1.0);
  CHECK(eq.phi_bar == doctest::Approx(1.0));  // a rho_bar / b
  const DerivedCoeffs d = stability_check(p, eq);
  CHECK(d.margin == doctest::Approx(1.0));
  CHECK(d.sigma == doctest::Approx(1.0));
  CHECK(d.stable);
}

TEST_CASE("quadratic pressure below a mu / b is unstable") {
  ModelParams p = canonical_params();
  p.pressure = PressureLaw::quadratic(0.5);
  const DerivedCoeffs d = stability_check(p, make_equilibrium(p, 1.0));
  CHECK(d.margin == doctest::Approx(-0.5));
  CHECK_FALSE(d.stable);
}

TEST_CASE("pressure derivatives match finite differences") {
  for (const PressureLaw law : {PressureLaw::quadratic(1.7), PressureLaw::power(0.8, 1.4)}) {
    for (double rho : {0.3, 1.0, 2.5}) {
      const double h = 1e-5;
      const double fd1 = (pressure_eval(law, rho + h, 0) - pressure_eval(law, rho - h, 0)) / (2 * h);
      const double fd2 = (pressure_eval(law, rho + h, 1) - pressure_eval(law, rho - h, 1)) / (2 * h);
      CHECK(pressure_eval(law, rho, 1) == doctest::Approx(fd1).epsilon(1e-8));
      CHECK(pressure_eval(law, rho, 2) == doctest::Approx(fd2).epsilon(1e-7));
    }
  }
}

TEST_CASE("flux derivative at the ground state equals sigma") {
  ModelParams p = canonical_params();
  p.pressure = PressureLaw::power(1.3, 1.7);
  p.mu = 0.7;
  const Equilibrium eq = make_equilibrium(p, 1.2);
  const double h = 1e-5;
  const double fd = (flux_q(p, eq.rho_bar + h) - flux_q(p, eq.rho_bar - h)) / (2 * h);
  CHECK(fd == doctest::Approx(stability_check(p, eq).sigma).epsilon(1e-7));
}

TEST_CASE("potential G vanishes to second order at the ground state") {
  for (const PressureLaw law : {PressureLaw::quadratic(2.0), PressureLaw::power(1.0, 2.5)}) {
    ModelParams p = canonical_params();
    p.pressure = law;
    const Equilibrium eq = make_equilibrium(p, 1.0);
    CHECK(std::abs(potential_G(p, eq, 1.0)) < 1e-14);
    // G'' = P'(rho)/rho, so G(rho_bar + e) ~ P'(rho_bar)/rho_bar e^2 / 2.
    const double e = 1e-3;
    const double c = pressure_eval(law, 1.0, 1) / 1.0;
    CHECK(potential_G(p, eq, 1.0 + e) == doctest::Approx(0.5 * c * e * e).epsilon(1e-2));
    // Independent check by Simpson integration of (rho - s) P'(s) / s.
    const double rho = 1.6;
    const int n = 2000;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double s = 1.0 + (rho - 1.0) * i / n;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * (rho - s) * pressure_eval(law, s, 1) / s;
    }
    acc *= (rho - 1.0) / (3.0 * n);
    CHECK(potential_G(p, eq, rho) == doctest::Approx(acc).epsilon(1e-9));
  }
}

TEST_CASE("invalid parameters are rejected") {
  ModelParams p = canonical_params();
  CHECK_THROWS_AS(make_equilibrium(p, -1.0), DomainError);
  CHECK_THROWS_AS(PressureLaw::quadratic(-1.0).validate(), DomainError);
  CHECK_THROWS_AS(PressureLaw::power(1.0, 0.5).validate(), DomainError);
}
