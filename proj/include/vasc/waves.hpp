#pragma once

// Linear diffusion-wave profile (rho~, u~, phi~) with
//   rho~_t = sigma lap rho~,  rho_bar u~ = -sigma grad rho~,  phi~ = (a/b) rho~,
// built spectrally on the periodic grid.

#include <array>
#include <span>

#include "vasc/grid.hpp"
#include "vasc/model.hpp"

namespace vasc {

struct HeatKernelParams {
  double sigma = 1.0;
  int dim = 3;
};

/// (4 pi sigma t)^{-d/2} exp(-|x|^2 / (4 sigma t)); throws DomainError for t <= 0.
double heat_kernel(const HeatKernelParams& hk, double t, std::span<const double> x);

struct WaveProfile {
  double t = 0.0;
  RealField rho_tilde;
  std::array<RealField, 3> u_tilde;  // first grid.dim entries populated
  RealField phi_tilde;
};

/// Spectral profile from the initial perturbation rho0 - rho_bar (real field).
WaveProfile diffusion_wave(const ModelParams& p, const Equilibrium& eq, Fft& fft,
                           const RealField& rho0_perturbation, double t);

/// Same, starting from the perturbation's spectrum; also returns the spectra.
struct WaveSpectra {
  SpecField rho;
  std::array<SpecField, 3> u;
  SpecField phi;
};
WaveSpectra diffusion_wave_spectra(const ModelParams& p, const Equilibrium& eq, const Grid& g,
                                   const SpecField& rho0_hat, double t);

}  // namespace vasc
