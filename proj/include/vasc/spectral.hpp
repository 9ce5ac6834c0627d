#pragma once

// Linearised system in Fourier space. A mode [rho^, u^, phi^] at wavevector k
// splits into a transverse part of u^ (damped by exp(-alpha t)) and the
// longitudinal triple [rho^, i k.u^, phi^] evolved by exp(A(|k|) t).

#include <array>
#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vasc/model.hpp"

namespace vasc {

using Complex = std::complex<double>;
using Mat3c = Eigen::Matrix3cd;
using Vec3 = std::array<double, 3>;
using Roots = std::array<Complex, 3>;

struct WaveVector {
  Vec3 k{0.0, 0.0, 0.0};

  double magnitude() const;
  /// k/|k|; throws DomainError at k = 0.
  Vec3 direction() const;
};

struct ModeState {
  Complex rho{};
  std::array<Complex, 3> u{};
  Complex phi{};

  double norm() const;  // sqrt(|rho|^2 + |u|^2 + |phi|^2)
};

ModeState operator-(const ModeState& x, const ModeState& y);

/// det(lambda I - A) = lambda^3 + c2 lambda^2 + c1 lambda + c0.
struct CubicCoeffs {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  Complex eval(Complex lambda) const { return ((lambda + c2) * lambda + c1) * lambda + c0; }
  Complex derivative(Complex lambda) const { return (3.0 * lambda + 2.0 * c2) * lambda + c1; }
};

enum class RootClass { three_real, one_real_pair_complex, degenerate };

const char* to_string(RootClass c);

struct CubicRoots {
  Roots roots{};
  double discriminant = 0.0;
  RootClass cls = RootClass::degenerate;
  /// Set when |discriminant| fell below the classification tolerance and
  /// the roots came from the companion-matrix eigenvalues instead.
  bool degenerate_fallback = false;
};

Mat3c assemble_A(const ModelParams& p, const Equilibrium& eq, double kmag);
CubicCoeffs characteristic_coeffs(const ModelParams& p, const Equilibrium& eq, double kmag);
double discriminant(const CubicCoeffs& c);

/// Trigonometric / Cardano branch with Newton polish. Roots are returned in a
/// fixed order (real roots descending, then the complex pair with Im > 0 first).
CubicRoots solve_cubic(const CubicCoeffs& c);

/// Roots labelled lambda_1 (branch through 0), lambda_2 (through -b),
/// lambda_3 (through -alpha). For |k| <= 0.5 by proximity to the leading-order
/// predictions; beyond that by continuation in |k| from 0.5.
Roots labelled_roots(const ModelParams& p, const Equilibrium& eq, double kmag);

/// Leading-order predictions (-sigma |k|^2, -b, -alpha).
Roots asymptotic_roots(const ModelParams& p, const Equilibrium& eq, double kmag);

inline constexpr double kDefaultSeparationTol = 1e-6;

/// P_j = prod_{l != j} (A - lambda_l I) / (lambda_j - lambda_l). Throws
/// DegenerateError when two roots are closer than tol_rel * spectral radius.
std::array<Mat3c, 3> eigenprojections(const Mat3c& A, const Roots& roots,
                                      double tol_rel = kDefaultSeparationTol);

struct SpectralDecomposition {
  Roots lambda{};
  double discriminant = 0.0;
  RootClass cls = RootClass::degenerate;
  bool separated = false;  // projections valid
  std::array<Mat3c, 3> projections{};
};

/// Labelled roots plus projections (when the roots are separated).
SpectralDecomposition decompose(const ModelParams& p, const Equilibrium& eq, double kmag);

/// sum_j exp(lambda_j t) P_j. Throws DegenerateError if !d.separated.
Mat3c propagator(const SpectralDecomposition& d, double t);

/// Putzer representation exp(At) = sum_j r_j(t) M_{j-1}; valid for repeated roots.
Mat3c propagator_putzer(const Mat3c& A, const Roots& roots, double t);

/// Divided differences exp(t.)[l1], exp(t.)[l1,l2], exp(t.)[l1,l2,l3].
std::array<Complex, 3> exp_divided_differences(const Roots& l, double t);

/// exp(A(|k|) t) for repeated use at one |k|; picks the projection formula when
/// the roots are separated and the Putzer recurrence otherwise.
class LongitudinalPropagator {
 public:
  LongitudinalPropagator(const ModelParams& p, const Equilibrium& eq, double kmag);

  Mat3c at(double t) const;
  const Roots& roots() const { return roots_; }
  bool uses_projections() const { return separated_; }

 private:
  Mat3c A_;
  Roots roots_{};
  bool separated_ = false;
  std::array<Mat3c, 3> proj_{};
};

/// Full mode evolution: longitudinal triple by exp(A t), transverse part of u^
/// by exp(-alpha t). At k = 0, rho^ is constant, phi^ relaxes to (a/b) rho^.
ModeState mode_evolve_linear(const ModelParams& p, const Equilibrium& eq, const WaveVector& k,
                             const ModeState& m0, double t);

/// Same, reusing a propagator built for |k|.
ModeState mode_evolve_linear(const LongitudinalPropagator& prop, double alpha,
                             const WaveVector& k, const ModeState& m0, double t);

/// Generator of the linear Fourier ODE: returns dm/dt.
ModeState linear_generator(const ModelParams& p, const Equilibrium& eq, const WaveVector& k,
                           const ModeState& m);

/// Diffusion-wave profile of one mode: rho~ = exp(-sigma |k|^2 t) rho0,
/// u~ = -(sigma/rho_bar) i k rho~, phi~ = (a/b) rho~.
ModeState wave_profile_mode(const ModelParams& p, const Equilibrium& eq, const WaveVector& k,
                            Complex rho0_hat, double t);

struct ErrorProbe {
  double C = 1.0;
  double lambda = 0.1;
};

struct ErrorRatios {
  double err_rho = 0.0, err_u = 0.0, err_phi = 0.0;
  double ratio_rho = 0.0, ratio_u = 0.0, ratio_phi = 0.0;
};

inline constexpr double kDefaultSmallFrequencyRadius = 0.5;

/// Measured |U^ - U~^| per component divided by the small-frequency envelope
/// C |k|^m exp(-lambda |k|^2 t)|U0| + C exp(-lambda t)|U0| (m = 1 for rho, phi;
/// m = 2 for u). Requires |k| <= r0.
ErrorRatios error_bound_ratio(const ModelParams& p, const Equilibrium& eq, const WaveVector& k,
                              const ModeState& m0, double t,
                              const ErrorProbe& probe,
                              double r0 = kDefaultSmallFrequencyRadius);

/// Finds (C, lambda) on a (k, t) grid: the largest lambda (bisection) whose
/// required C stays within `slack` times the C needed as lambda -> 0.
ErrorProbe calibrate_error_probe(const ModelParams& p, const Equilibrium& eq,
                                 std::span<const WaveVector> ks, std::span<const ModeState> m0s,
                                 std::span<const double> ts, double slack = 4.0);

/// Certificate for |U^(t,k)| <= C exp(-lambda |k|^2 t/(1+|k|^2)) (|U0| + |k||phi0|):
/// lambda is the largest rate found by bisection keeping the sup on the grid
/// within `slack` times its lambda -> 0 value.
struct PointwiseBound {
  double lambda = 0.0;
  double C = 0.0;
};
PointwiseBound certify_pointwise_bound(const ModelParams& p, const Equilibrium& eq,
                                       std::span<const WaveVector> ks,
                                       std::span<const ModeState> m0s,
                                       std::span<const double> ts, double slack = 2.0);

struct SpectrumRow {
  double kmag = 0.0;
  Roots lambda{};
  double discriminant = 0.0;
  RootClass cls = RootClass::degenerate;
  Roots predicted{};
};

std::vector<SpectrumRow> spectrum_sweep(const ModelParams& p, const Equilibrium& eq,
                                        std::span<const double> kmags);

/// kmag, Re/Im lambda_1..3, Delta, class, then predictions and gaps.
void write_spectrum_csv(std::ostream& os, std::span<const SpectrumRow> rows);

struct ErrorRatioRow {
  double kmag = 0.0;
  double t = 0.0;
  ErrorRatios r{};
};
void write_error_ratio_csv(std::ostream& os, std::span<const ErrorRatioRow> rows);

}  // namespace vasc
