#pragma once

// Per-mode time-frequency Lyapunov functional
//
//   E(U, k) = P'/rho_bar |rho|^2 + rho_bar |u|^2 + (mu D/a)|k|^2 |phi|^2 + (b mu/a)|phi|^2
//             - 2 Re(mu phi conj(rho))
//             + kappa { Re(u . conj(i k rho)) / (1+|k|^2) + (mu/2a) |k|^2/(1+|k|^2) |phi|^2 }
//
// written as a Hermitian form x^* H(k) x in x = (rho, u1, u2, u3, phi).

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vasc/model.hpp"
#include "vasc/spectral.hpp"

namespace vasc {

using Mat5c = Eigen::Matrix<Complex, 5, 5>;

struct LyapunovWeights {
  ModelParams params{};
  Equilibrium eq{};
  double kappa = 0.0;
  /// Certified rate: dE/dt <= -lambda |k|^2/(1+|k|^2) E on the sample set.
  double lambda = 0.0;
  /// c_low (|U|^2 + |k|^2|phi|^2) <= E <= c_high (...) on the sample set.
  double c_low = 0.0;
  double c_high = 0.0;
  /// mu = 0 decouples phi; the form then acts on (rho, u) only.
  bool reduced = false;
};

struct ModeEnergy {
  double base = 0.0;
  double kappa_part = 0.0;
  double value = 0.0;
};

/// H(k) for the given kappa (no validation of definiteness).
Mat5c lyapunov_form(const ModelParams& p, const Equilibrium& eq, double kappa,
                    const WaveVector& k);

/// Linear generator M(k) with dx/dt = M x, same ordering as the form.
Mat5c mode_generator(const ModelParams& p, const Equilibrium& eq, const WaveVector& k);

/// Instantaneous decay rate: the smallest r with dE/dt <= -r E, i.e. the least
/// generalised eigenvalue of (-(HM + M^*H), H). Requires H positive definite.
double instantaneous_rate(const ModelParams& p, const Equilibrium& eq, double kappa,
                          const WaveVector& k, bool reduced);

/// |k| samples used by kappa_select: 0, the verification grid, and a
/// log-spaced sweep of [1e-3, 10].
std::vector<double> lyapunov_k_samples();

/// Dyadic descent kappa = 1/2, 1/4, ...; returns the first kappa whose form is
/// positive definite on the sample set with a positive certified lambda.
/// Throws StabilityError when margin <= 0.
LyapunovWeights kappa_select(const ModelParams& p, const Equilibrium& eq);

ModeEnergy mode_energy(const LyapunovWeights& w, const WaveVector& k, const ModeState& m);

struct DissipationReport {
  double max_ratio = 0.0;  // max_t E(t) / (E(0) exp(-lambda k^2 t/(1+k^2)))
  double worst_t = 0.0;
  double kmag = 0.0;
  bool passed = true;
};

struct DissipationSample {
  double kmag, t, energy, envelope, ratio;
};

/// Evolves m0 with the exact linear propagator, samples E every dt up to
/// `horizon`, and compares with the certified envelope. Appends samples to
/// `trace` when non-null.
DissipationReport dissipation_check(const LyapunovWeights& w, const WaveVector& k,
                                    const ModeState& m0, double horizon, double dt,
                                    std::vector<DissipationSample>* trace = nullptr,
                                    double tolerance = 1e-8);

/// kmag, t, energy, envelope, ratio
void write_dissipation_csv(std::ostream& os, std::span<const DissipationSample> rows);

}  // namespace vasc
