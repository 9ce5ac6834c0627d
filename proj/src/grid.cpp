#include "vasc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <omp.h>

#include "vasc/errors.hpp"

namespace vasc {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int g_threads = 1;

void init_fftw_threads() {
  static std::once_flag once;
  std::call_once(once, [] { fftw_init_threads(); });
}

}  // namespace

void set_num_threads(int threads) {
  g_threads = std::max(1, threads);
  omp_set_num_threads(g_threads);
}

int num_threads() { return g_threads; }

void Grid::validate() const {
  if (dim < 1 || dim > 3) throw DomainError("grid: dim must be 1, 2 or 3");
  if (n < 16 || (n & (n - 1)) != 0)
    throw DomainError("grid: n must be a power of two >= 16");
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("grid: length must be positive");
}

double Grid::volume() const { return std::pow(length, dim); }
double Grid::cell_volume() const { return std::pow(h(), dim); }

std::size_t Grid::real_size() const {
  return static_cast<std::size_t>(n) * ny() * nz();
}

std::size_t Grid::spec_size() const {
  return static_cast<std::size_t>(nxh()) * ny() * nz();
}

double Grid::wavenumber(int signed_mode) const {
  return 2.0 * std::numbers::pi * signed_mode / length;
}

void Grid::modes(std::size_t s, int m[3]) const {
  const std::size_t nx = nxh();
  const int mx = static_cast<int>(s % nx);
  const std::size_t rest = s / nx;
  const int my = static_cast<int>(rest % ny());
  const int mz = static_cast<int>(rest / ny());
  m[0] = mode_x(mx);
  m[1] = dim >= 2 ? mode_yz(my) : 0;
  m[2] = dim >= 3 ? mode_yz(mz) : 0;
}

void Grid::wavevector(std::size_t s, double k[3]) const {
  int m[3];
  modes(s, m);
  for (int j = 0; j < 3; ++j) k[j] = wavenumber(m[j]);
}

void Grid::position(std::size_t i, double x[3]) const {
  const std::size_t ix = i % n;
  const std::size_t rest = i / n;
  const std::size_t iy = rest % ny();
  const std::size_t iz = rest / ny();
  x[0] = ix * h();
  x[1] = dim >= 2 ? iy * h() : 0.0;
  x[2] = dim >= 3 ? iz * h() : 0.0;
}

bool Grid::retained(std::size_t s) const {
  int m[3];
  modes(s, m);
  const int cut = n / 3;
  return std::abs(m[0]) <= cut && std::abs(m[1]) <= cut && std::abs(m[2]) <= cut;
}

double Grid::hermitian_weight(std::size_t s) const {
  const int mx = static_cast<int>(s % nxh());
  return (mx == 0 || mx == n / 2) ? 1.0 : 2.0;
}

struct Fft::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

Fft::Fft(const Grid& g) : grid_(g), impl_(std::make_unique<Impl>()) {
  grid_.validate();
  init_fftw_threads();
  // FFTW dimensions are slowest-first, so x is the last entry.
  int dims[3];
  int rank = grid_.dim;
  if (rank == 1) {
    dims[0] = grid_.n;
  } else if (rank == 2) {
    dims[0] = grid_.n;
    dims[1] = grid_.n;
  } else {
    dims[0] = dims[1] = dims[2] = grid_.n;
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->real = fftw_alloc_real(grid_.real_size());
  impl_->spec = fftw_alloc_complex(grid_.spec_size());
  fftw_plan_with_nthreads(g_threads);
  impl_->fwd = fftw_plan_dft_r2c(rank, dims, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r(rank, dims, impl_->spec, impl_->real, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->inv) throw NumericError("fft: plan creation failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->inv) fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->real);
  fftw_free(impl_->spec);
}

void Fft::forward(const RealField& in, SpecField& out) {
  const std::size_t nr = grid_.real_size(), ns = grid_.spec_size();
  if (in.size() != nr) throw DomainError("fft: real field has wrong size");
  std::memcpy(impl_->real, in.data(), nr * sizeof(double));
  fftw_execute(impl_->fwd);
  out.resize(ns);
  const double scale = 1.0 / static_cast<double>(nr);
  auto* src = reinterpret_cast<std::complex<double>*>(impl_->spec);
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < ns; ++s) out[s] = src[s] * scale;
}

void Fft::inverse(const SpecField& in, RealField& out) {
  const std::size_t nr = grid_.real_size(), ns = grid_.spec_size();
  if (in.size() != ns) throw DomainError("fft: spectral field has wrong size");
  std::memcpy(static_cast<void*>(impl_->spec), in.data(), ns * sizeof(fftw_complex));
  fftw_execute(impl_->inv);
  out.resize(nr);
  std::memcpy(out.data(), impl_->real, nr * sizeof(double));
}

SpecField Fft::forward(const RealField& in) {
  SpecField out;
  forward(in, out);
  return out;
}

RealField Fft::inverse(const SpecField& in) {
  RealField out;
  inverse(in, out);
  return out;
}

double parseval_l2_squared(const Grid& g, const SpecField& f) {
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::size_t i = 0; i < f.size(); ++i) s += g.hermitian_weight(i) * std::norm(f[i]);
  return g.volume() * s;
}

double parseval_inner(const Grid& g, const SpecField& f, const SpecField& h) {
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::size_t i = 0; i < f.size(); ++i)
    s += g.hermitian_weight(i) * std::real(f[i] * std::conj(h[i]));
  return g.volume() * s;
}

void dealias(const Grid& g, SpecField& f) {
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < f.size(); ++s)
    if (!g.retained(s)) f[s] = 0.0;
}

SpecField spectral_derivative(const Grid& g, const SpecField& f, int axis) {
  SpecField out(f.size());
  const int half = g.n / 2;
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < f.size(); ++s) {
    int m[3];
    g.modes(s, m);
    if (std::abs(m[axis]) == half) {
      out[s] = 0.0;
    } else {
      out[s] = std::complex<double>(0.0, g.wavenumber(m[axis])) * f[s];
    }
  }
  return out;
}

}  // namespace vasc
