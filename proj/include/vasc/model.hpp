#pragma once

// Physical parameters, pressure laws and the constant ground state of the
// damped hyperbolic-parabolic vasculogenesis model
//
//   rho_t + div(rho u) = 0
//   (rho u)_t + div(rho u (x) u) + grad P(rho) = mu rho grad phi - alpha rho u
//   phi_t = D lap phi + a rho - b phi

namespace vasc {

enum class PressureKind { quadratic, power };

/// P(rho) = K/2 rho^2 (quadratic) or K rho^gamma (power).
struct PressureLaw {
  PressureKind kind = PressureKind::quadratic;
  double K = 2.0;
  double gamma = 2.0;  // only used by the power law

  static PressureLaw quadratic(double K);
  static PressureLaw power(double K, double gamma);

  /// Throws DomainError unless K > 0 and gamma >= 1.
  void validate() const;
};

/// P, P' or P'' at rho > 0.
double pressure_eval(const PressureLaw& law, double rho, int order);

struct ModelParams {
  double mu = 1.0;
  double alpha = 1.0;
  double D = 1.0;
  double a = 1.0;
  double b = 1.0;
  PressureLaw pressure{};

  /// alpha, D, a, b > 0 and mu >= 0 (mu = 0 switches chemotaxis off).
  void validate() const;

  double P(double rho) const { return pressure_eval(pressure, rho, 0); }
  double dP(double rho) const { return pressure_eval(pressure, rho, 1); }
  double d2P(double rho) const { return pressure_eval(pressure, rho, 2); }
};

struct Equilibrium {
  double rho_bar = 1.0;
  double phi_bar = 1.0;
};

/// Ground state (rho_bar, a rho_bar / b). Throws DomainError for rho_bar <= 0.
Equilibrium make_equilibrium(const ModelParams& p, double rho_bar);

struct DerivedCoeffs {
  double margin = 0.0;  // b P'(rho_bar) - a mu rho_bar
  double sigma = 0.0;   // margin / (b alpha)
  bool stable = false;  // margin > 0
};

DerivedCoeffs stability_check(const ModelParams& p, const Equilibrium& eq);

/// q(rho) = (P(rho) - a mu rho^2 / (2b)) / alpha; q'(rho_bar) = sigma.
double flux_q(const ModelParams& p, double rho);

/// G with G'' = P'/rho, normalised so that G(rho_bar) = G'(rho_bar) = 0.
/// Closed form for the quadratic law, adaptive Gauss-Kronrod otherwise.
double potential_G(const ModelParams& p, const Equilibrium& eq, double rho);

/// The canonical parameter set a=b=mu=alpha=D=1, quadratic K=2.
ModelParams canonical_params();

}  // namespace vasc
