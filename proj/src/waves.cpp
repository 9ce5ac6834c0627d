#include "vasc/waves.hpp"

#include <cmath>
#include <numbers>

#include "vasc/errors.hpp"

namespace vasc {

double heat_kernel(const HeatKernelParams& hk, double t, std::span<const double> x) {
  if (!(t > 0.0)) throw DomainError("heat_kernel: t must be positive");
  if (!(hk.sigma > 0.0)) throw DomainError("heat_kernel: sigma must be positive");
  if (static_cast<int>(x.size()) != hk.dim) throw DomainError("heat_kernel: x has wrong dimension");
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double s = 4.0 * hk.sigma * t;
  return std::pow(std::numbers::pi * s, -0.5 * hk.dim) * std::exp(-r2 / s);
}

WaveSpectra diffusion_wave_spectra(const ModelParams& p, const Equilibrium& eq, const Grid& g,
                                   const SpecField& rho0_hat, double t) {
  if (t < 0.0) throw DomainError("diffusion_wave: t must be >= 0");
  if (rho0_hat.size() != g.spec_size()) throw DomainError("diffusion_wave: spectrum size mismatch");
  const double sigma = stability_check(p, eq).sigma;
  WaveSpectra w;
  const std::size_t ns = g.spec_size();
  w.rho.resize(ns);
  w.phi.resize(ns);
  for (int j = 0; j < g.dim; ++j) w.u[j].resize(ns);
  const int half = g.n / 2;
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < ns; ++s) {
    double k[3];
    int m[3];
    g.wavevector(s, k);
    g.modes(s, m);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const std::complex<double> r = std::exp(-sigma * k2 * t) * rho0_hat[s];
    w.rho[s] = r;
    w.phi[s] = (p.a / p.b) * r;
    for (int j = 0; j < g.dim; ++j) {
      const double kj = std::abs(m[j]) == half ? 0.0 : k[j];
      w.u[j][s] = -(sigma / eq.rho_bar) * std::complex<double>(0.0, kj) * r;
    }
  }
  return w;
}

WaveProfile diffusion_wave(const ModelParams& p, const Equilibrium& eq, Fft& fft,
                           const RealField& rho0_perturbation, double t) {
  const Grid& g = fft.grid();
  const WaveSpectra w = diffusion_wave_spectra(p, eq, g, fft.forward(rho0_perturbation), t);
  WaveProfile out;
  out.t = t;
  if (t == 0.0)
    out.rho_tilde = rho0_perturbation;
  else
    fft.inverse(w.rho, out.rho_tilde);
  for (int j = 0; j < g.dim; ++j) fft.inverse(w.u[j], out.u_tilde[j]);
  out.phi_tilde.resize(out.rho_tilde.size());
  for (std::size_t i = 0; i < out.rho_tilde.size(); ++i)
    out.phi_tilde[i] = (p.a / p.b) * out.rho_tilde[i];
  return out;
}

}  // namespace vasc
