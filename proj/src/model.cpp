#include "vasc/model.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vasc/errors.hpp"

namespace vasc {

PressureLaw PressureLaw::quadratic(double K) {
  PressureLaw law{PressureKind::quadratic, K, 2.0};
  law.validate();
  return law;
}

PressureLaw PressureLaw::power(double K, double gamma) {
  PressureLaw law{PressureKind::power, K, gamma};
  law.validate();
  return law;
}

void PressureLaw::validate() const {
  if (!(K > 0.0)) throw DomainError("pressure: K must be positive");
  if (kind == PressureKind::power && !(gamma >= 1.0))
    throw DomainError("pressure: gamma must be >= 1");
}

double pressure_eval(const PressureLaw& law, double rho, int order) {
  if (!(rho > 0.0)) throw DomainError("pressure_eval: rho must be positive");
  if (law.kind == PressureKind::quadratic) {
    switch (order) {
      case 0: return 0.5 * law.K * rho * rho;
      case 1: return law.K * rho;
      case 2: return law.K;
    }
  } else {
    const double g = law.gamma;
    switch (order) {
      case 0: return law.K * std::pow(rho, g);
      case 1: return law.K * g * std::pow(rho, g - 1.0);
      case 2: return law.K * g * (g - 1.0) * std::pow(rho, g - 2.0);
    }
  }
  throw DomainError("pressure_eval: order must be 0, 1 or 2");
}

void ModelParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError(std::string("model: ") + name + " must be positive");
  };
  positive(alpha, "alpha");
  positive(D, "D");
  positive(a, "a");
  positive(b, "b");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("model: mu must be >= 0");
  pressure.validate();
}

Equilibrium make_equilibrium(const ModelParams& p, double rho_bar) {
  if (!(rho_bar > 0.0)) throw DomainError("equilibrium: rho_bar must be positive");
  return {rho_bar, p.a * rho_bar / p.b};
}

DerivedCoeffs stability_check(const ModelParams& p, const Equilibrium& eq) {
  DerivedCoeffs c;
  c.margin = p.b * p.dP(eq.rho_bar) - p.a * p.mu * eq.rho_bar;
  c.sigma = c.margin / (p.b * p.alpha);
  c.stable = c.margin > 0.0;
  return c;
}

double flux_q(const ModelParams& p, double rho) {
  return (p.P(rho) - p.a * p.mu / (2.0 * p.b) * rho * rho) / p.alpha;
}

double potential_G(const ModelParams& p, const Equilibrium& eq, double rho) {
  if (!(rho > 0.0)) throw DomainError("potential_G: rho must be positive");
  const double rb = eq.rho_bar;
  if (p.pressure.kind == PressureKind::quadratic) {
    const double d = rho - rb;
    return 0.5 * p.pressure.K * d * d;
  }
  if (rho == rb) return 0.0;
  // G(rho) = int_{rho_bar}^{rho} (rho - s) P'(s)/s ds
  auto integrand = [&](double s) { return (rho - s) * p.dP(s) / s; };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, rb, rho, 15, 1e-13, &err);
  if (!std::isfinite(value) || err > 1e-10 * std::max(1.0, std::abs(value)))
    throw NumericError("potential_G: quadrature did not converge");
  return value;
}

ModelParams canonical_params() {
  ModelParams p;
  p.mu = p.alpha = p.D = p.a = p.b = 1.0;
  p.pressure = PressureLaw::quadratic(2.0);
  return p;
}

}  // namespace vasc
