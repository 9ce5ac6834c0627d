#pragma once

// Periodic box [0, L)^d with n points per side and real-to-complex FFTs.
//
// Real fields are stored x-fastest: index = ix + n (iy + n iz). Spectral
// fields keep the non-redundant half in x: index = mx + nxh (my + n mz) with
// nxh = n/2 + 1. Spectral coefficients are Fourier-series amplitudes, i.e.
// f(x) = sum_m f^_m exp(i k_m . x), so the forward transform carries 1/N.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace vasc {

using RealField = std::vector<double>;
using SpecField = std::vector<std::complex<double>>;

struct Grid {
  int dim = 3;
  int n = 64;
  double length = 1.0;

  /// Throws DomainError unless dim in {1,2,3}, n >= 16 is a power of two and L > 0.
  void validate() const;

  double h() const { return length / n; }
  double volume() const;
  double cell_volume() const;
  int ny() const { return dim >= 2 ? n : 1; }
  int nz() const { return dim >= 3 ? n : 1; }
  int nxh() const { return n / 2 + 1; }
  std::size_t real_size() const;
  std::size_t spec_size() const;

  /// Signed mode number along an axis: x uses 0..n/2, y and z wrap at n/2.
  int mode_x(int mx) const { return mx; }
  int mode_yz(int m) const { return m <= n / 2 ? m : m - n; }
  double wavenumber(int signed_mode) const;

  /// Wavevector of spectral index s (zero components beyond dim).
  void wavevector(std::size_t s, double k[3]) const;
  /// Signed mode numbers of spectral index s.
  void modes(std::size_t s, int m[3]) const;
  /// Coordinates of real index i.
  void position(std::size_t i, double x[3]) const;

  /// 2/3 rule: every |m_j| <= n/3.
  bool retained(std::size_t s) const;
  /// Multiplicity of a half-spectrum coefficient in the full spectrum (1 or 2).
  double hermitian_weight(std::size_t s) const;
};

/// FFTW plans for one grid. Instances are not shared across threads; plan
/// creation is serialised internally.
class Fft {
 public:
  explicit Fft(const Grid& g);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  const Grid& grid() const { return grid_; }

  void forward(const RealField& in, SpecField& out);
  void inverse(const SpecField& in, RealField& out);

  SpecField forward(const RealField& in);
  RealField inverse(const SpecField& in);

 private:
  struct Impl;
  Grid grid_;
  std::unique_ptr<Impl> impl_;
};

/// Sets the thread count used by plans created afterwards (FFTW threads) and
/// by OpenMP loops.
void set_num_threads(int threads);
int num_threads();

/// int |f|^2 over the box via Parseval.
double parseval_l2_squared(const Grid& g, const SpecField& f);
/// int f conj(g) over the box via Parseval (real part).
double parseval_inner(const Grid& g, const SpecField& f, const SpecField& h);
/// Zeroes every coefficient outside the 2/3 mask.
void dealias(const Grid& g, SpecField& f);
/// Spectral derivative along axis j.
SpecField spectral_derivative(const Grid& g, const SpecField& f, int axis);

}  // namespace vasc
