#pragma once

// Norms, whole-space linear decay curves, power-law fits and rate tables.

#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vasc/grid.hpp"
#include "vasc/model.hpp"

namespace vasc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;

  /// Throws DomainError unless lengths match, times increase strictly and
  /// every entry is finite.
  void validate() const;
};

/// L^q norm over the box: q = 2 by Parseval, q = inf as the grid maximum,
/// other q >= 2 by a Riemann sum.
double lq_norm(Fft& fft, const RealField& f, double q);
double lq_norm(const Grid& g, const RealField& f, double q);

/// (sum_{|l| <= N} ||d^l f||^2)^{1/2} via spectral multipliers.
double sobolev_norm(Fft& fft, const RealField& f, int N);
double sobolev_norm(const Grid& g, const RealField& f, int N);

/// Gaussian whole-space data: rho^_0 = A exp(-s|k|^2), u^_0 = e_1 B exp(-s|k|^2),
/// phi^_0 = (a/b) rho^_0. s <= 0 selects s = sigma.
struct RadialProfile {
  double rho_amplitude = 1.0;
  double u_amplitude = 1.0;
  double width = 0.0;
};

enum class Quantity { rho, u, phi, rho_minus_wave, u_minus_wave, phi_minus_wave, rho_wave, u_wave };
const char* to_string(Quantity q);
Quantity quantity_from_string(const std::string& s);

/// L^2(R^3) norm (q = 2) or the L^1-Fourier envelope (2 pi)^{-3} int |U^| dk
/// of the L^inf norm (q = inf) of the linear solution, by radial Gauss-Kronrod
/// on geometric breakpoints and Gauss-Legendre in cos(theta).
/// Throws NumericError if the quadrature does not converge.
TimeSeries linear_decay_curve(const ModelParams& p, const Equilibrium& eq,
                              const RadialProfile& profile, std::span<const double> times,
                              Quantity quantity, double q = 2.0);

struct FitWindow {
  double lo = 10.0;
  double hi = kInf;
};

struct DecayFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  std::size_t samples = 0;
  /// |exponent| above 5: not plausibly algebraic.
  bool steep = false;
  /// log v is better explained by t than by log(1+t).
  bool exponential_like = false;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// OLS of log v against log(1+t) on the window. Throws FitError for fewer than
/// 8 samples, non-positive values, or R^2 < 0.9 unless allow_low_r2.
DecayFit fit_decay(const TimeSeries& ts, const FitWindow& window = {},
                   bool allow_low_r2 = false);

/// Theory exponents in dimension d. Keys: rho, phi, u, rho_minus_wave,
/// phi_minus_wave, u_minus_wave (all with q), state_HN, grad_state, grad_u,
/// grad2_rho (q ignored). Throws DomainError for an unknown key.
double theory_exponent(const std::string& quantity, double q, int dim = 3);

struct RateRow {
  std::string quantity;
  double q = 2.0;
  double theory = 0.0;
  double fitted = 0.0;
  double gap = 0.0;
  double r2 = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;
};

struct NamedFit {
  std::string quantity;
  double q = 2.0;
  DecayFit fit;
};

RateTable rate_table(std::span<const NamedFit> fits, int dim = 3);

/// quantity, q, theory_exponent, fitted_exponent, gap, r2, window_lo, window_hi
void write_rate_table_csv(std::ostream& os, const RateTable& table);
/// t, value
void write_series_csv(std::ostream& os, const TimeSeries& ts, const std::string& name);

/// Log-spaced sample times on [lo, hi].
std::vector<double> log_times(double lo, double hi, int n);

}  // namespace vasc
