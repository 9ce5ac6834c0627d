#include "vasc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "vasc/errors.hpp"
#include "vasc/waves.hpp"

namespace vasc {

namespace {

using C = std::complex<double>;
constexpr C kI{0.0, 1.0};

SpecState zeros_like(const Grid& g) {
  SpecState s;
  const std::size_t ns = g.spec_size();
  s.rho.assign(ns, 0.0);
  s.phi.assign(ns, 0.0);
  for (int j = 0; j < g.dim; ++j) s.u[j].assign(ns, 0.0);
  return s;
}

// All multi-indices l in N^dim with |l| <= N.
std::vector<std::array<int, 3>> multi_indices(int dim, int N) {
  std::vector<std::array<int, 3>> out;
  for (int a = 0; a <= N; ++a)
    for (int b = 0; b <= (dim >= 2 ? N - a : 0); ++b)
      for (int c = 0; c <= (dim >= 3 ? N - a - b : 0); ++c) out.push_back({a, b, c});
  return out;
}

// sum_{|l| <= N} prod_j k_j^{2 l_j}
double sobolev_weight(const double k[3], int dim, int N) {
  if (N < 0) return 0.0;
  double w = 0.0;
  for (const auto& l : multi_indices(dim, N)) {
    double t = 1.0;
    for (int j = 0; j < 3; ++j) t *= std::pow(k[j] * k[j], l[j]);
    w += t;
  }
  return w;
}

// (i k)^l
C derivative_symbol(const double k[3], const std::array<int, 3>& l) {
  C s = 1.0;
  for (int j = 0; j < 3; ++j)
    for (int r = 0; r < l[j]; ++r) s *= kI * k[j];
  return s;
}

double weighted_parseval(const Grid& g, const SpecField& f, const SpecField& h,
                         const std::vector<double>& weight) {
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::size_t i = 0; i < f.size(); ++i)
    s += g.hermitian_weight(i) * weight[i] * std::real(f[i] * std::conj(h[i]));
  return g.volume() * s;
}

}  // namespace

const char* to_string(Scheme s) {
  return s == Scheme::if_rk4 ? "if_rk4" : "imex_bdf2";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "if_rk4") return Scheme::if_rk4;
  if (s == "imex_bdf2") return Scheme::imex_bdf2;
  throw DomainError("unknown scheme '" + s + "' (expected if_rk4 or imex_bdf2)");
}

double boundary_cutoff(const Grid& g, const ModelParams& p, const Equilibrium& eq) {
  const double sigma = stability_check(p, eq).sigma;
  if (!(sigma > 0.0)) return std::numeric_limits<double>::infinity();
  const double r = g.length / 8.0;
  return r * r / sigma;
}

struct Solver::Work {
  explicit Work(const Grid& g) : fft(g) {
    const std::size_t ns = g.spec_size();
    k.resize(ns);
    k2.resize(ns);
    keep.resize(ns);
    const int half = g.n / 2;
    for (std::size_t s = 0; s < ns; ++s) {
      int m[3];
      g.modes(s, m);
      g.wavevector(s, k[s].data());
      k2[s] = k[s][0] * k[s][0] + k[s][1] * k[s][1] + k[s][2] * k[s][2];
      // Odd derivatives of Nyquist modes are defined as zero.
      for (int j = 0; j < 3; ++j)
        if (std::abs(m[j]) == half) k[s][j] = 0.0;
      keep[s] = g.retained(s) ? 1 : 0;
    }
  }

  Fft fft;
  std::vector<std::array<double, 3>> k;
  std::vector<double> k2;
  std::vector<char> keep;
  double max_speed = 0.0;  // max(|u| + c_s) from the last explicit_rhs call

  RealField rho, tmp;
  std::array<RealField, 3> u, grho, prod;
  std::array<std::array<RealField, 3>, 3> gu;
  SpecField spec;
};

Solver::Solver(const ModelParams& p, const Equilibrium& eq, const Grid& g, SolverOptions opts)
    : p_(p), eq_(eq), grid_(g), opts_(opts) {
  p_.validate();
  grid_.validate();
  if (!(opts_.cfl_safety > 0.0)) throw DomainError("solver: cfl_safety must be positive");
  w_ = std::make_unique<Work>(grid_);
  v_ = zeros_like(grid_);
}

Solver::~Solver() = default;

void Solver::set_state(const FieldState& s) {
  if (s.grid.dim != grid_.dim || s.grid.n != grid_.n || s.grid.length != grid_.length)
    throw DomainError("solver: state grid does not match");
  const std::size_t nr = grid_.real_size();
  if (s.rho.size() != nr || s.phi.size() != nr) throw DomainError("solver: field size mismatch");
  RealField tmp(nr);
  for (std::size_t i = 0; i < nr; ++i) tmp[i] = s.rho[i] - eq_.rho_bar;
  w_->fft.forward(tmp, v_.rho);
  for (std::size_t i = 0; i < nr; ++i) tmp[i] = s.phi[i] - eq_.phi_bar;
  w_->fft.forward(tmp, v_.phi);
  for (int j = 0; j < grid_.dim; ++j) {
    if (s.u[j].size() != nr) throw DomainError("solver: velocity size mismatch");
    w_->fft.forward(s.u[j], v_.u[j]);
  }
  dealias(grid_, v_.rho);
  dealias(grid_, v_.phi);
  for (int j = 0; j < grid_.dim; ++j) dealias(grid_, v_.u[j]);
  t_ = s.t;
  have_prev_ = false;
}

FieldState Solver::state() const {
  FieldState s;
  s.grid = grid_;
  s.t = t_;
  Fft& fft = w_->fft;
  fft.inverse(v_.rho, s.rho);
  for (auto& r : s.rho) r += eq_.rho_bar;
  fft.inverse(v_.phi, s.phi);
  for (auto& r : s.phi) r += eq_.phi_bar;
  for (int j = 0; j < grid_.dim; ++j) fft.inverse(v_.u[j], s.u[j]);
  return s;
}

SpecState Solver::explicit_rhs(const SpecState& v) {
  Work& w = *w_;
  const Grid& g = grid_;
  const int d = g.dim;
  const std::size_t ns = g.spec_size(), nr = g.real_size();
  const double rb = eq_.rho_bar;
  const double c0 = p_.dP(rb) / rb;
  Fft& fft = w.fft;

  auto deriv = [&](const SpecField& f, int axis) {
    w.spec.resize(ns);
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < ns; ++s) w.spec[s] = kI * w.k[s][axis] * f[s];
    return w.spec;
  };

  fft.inverse(v.rho, w.rho);
  for (int j = 0; j < d; ++j) {
    fft.inverse(v.u[j], w.u[j]);
    fft.inverse(deriv(v.rho, j), w.grho[j]);
    for (int i = 0; i < d; ++i) fft.inverse(deriv(v.u[j], i), w.gu[i][j]);  // d_i u_j
  }

  // Vacuum and finiteness, plus the local signal speed for the CFL bound.
  double min_rho = std::numeric_limits<double>::infinity();
  double max_speed = 0.0;
  bool finite = true;
#pragma omp parallel for reduction(min : min_rho) reduction(max : max_speed) \
    reduction(&& : finite) schedule(static)
  for (std::size_t i = 0; i < nr; ++i) {
    const double r = rb + w.rho[i];
    double u2 = 0.0;
    for (int j = 0; j < d; ++j) u2 += w.u[j][i] * w.u[j][i];
    finite = finite && std::isfinite(r) && std::isfinite(u2);
    min_rho = std::min(min_rho, r);
    if (r > 0.0) max_speed = std::max(max_speed, std::sqrt(u2) + std::sqrt(p_.dP(r)));
  }
  if (!finite) throw BlowUpError("solver: non-finite field values", t_);
  if (!(min_rho > 0.0)) throw BlowUpError("solver: vacuum (rho <= 0)", t_);
  w.max_speed = max_speed;

  SpecState r = zeros_like(g);

  // Density.
  if (!opts_.advective_density) {
    for (int j = 0; j < d; ++j) {
      w.prod[j].resize(nr);
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < nr; ++i) w.prod[j][i] = w.rho[i] * w.u[j][i];
    }
    for (int j = 0; j < d; ++j) {
      fft.forward(w.prod[j], w.spec);
#pragma omp parallel for schedule(static)
      for (std::size_t s = 0; s < ns; ++s)
        r.rho[s] -= kI * w.k[s][j] * (rb * v.u[j][s] + w.spec[s]);
    }
  } else {
    w.tmp.resize(nr);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nr; ++i) {
      double div = 0.0, adv = 0.0;
      for (int j = 0; j < d; ++j) {
        div += w.gu[j][j][i];
        adv += w.u[j][i] * w.grho[j][i];
      }
      w.tmp[i] = -w.rho[i] * div - adv;
    }
    fft.forward(w.tmp, w.spec);
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < ns; ++s) {
      C lin = 0.0;
      for (int j = 0; j < d; ++j) lin += kI * w.k[s][j] * v.u[j][s];
      r.rho[s] = -rb * lin + w.spec[s];
    }
  }

  // Momentum: g2 = -u.grad u - (P'(rho)/rho - P'(rho_bar)/rho_bar) grad rho2.
  for (int j = 0; j < d; ++j) {
    w.prod[j].resize(nr);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nr; ++i) {
      const double rr = rb + w.rho[i];
      double adv = 0.0;
      for (int m = 0; m < d; ++m) adv += w.u[m][i] * w.gu[m][j][i];
      w.prod[j][i] = -adv - (p_.dP(rr) / rr - c0) * w.grho[j][i];
    }
    fft.forward(w.prod[j], w.spec);
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < ns; ++s)
      r.u[j][s] = w.spec[s] - c0 * kI * w.k[s][j] * v.rho[s] + p_.mu * kI * w.k[s][j] * v.phi[s];
  }

  // Chemoattractant source.
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < ns; ++s) r.phi[s] = p_.a * v.rho[s];

  dealias(g, r.rho);
  dealias(g, r.phi);
  for (int j = 0; j < d; ++j) dealias(g, r.u[j]);
  return r;
}

SpecState Solver::full_rhs(const SpecState& v) {
  SpecState r = explicit_rhs(v);
  const std::size_t ns = grid_.spec_size();
  for (std::size_t s = 0; s < ns; ++s) {
    r.phi[s] -= (p_.b + p_.D * w_->k2[s]) * v.phi[s];
    for (int j = 0; j < grid_.dim; ++j) r.u[j][s] -= p_.alpha * v.u[j][s];
  }
  return r;
}

double Solver::cfl_limit() {
  explicit_rhs(v_);
  const double sp = std::max(w_->max_speed, 1e-300);
  return opts_.cfl_safety * std::min(grid_.h() / sp, 1.0 / p_.alpha);
}

void Solver::check_state(const SpecState& v) {
  bool finite = true;
  auto scan = [&](const SpecField& f) {
    for (const auto& c : f)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        finite = false;
        return;
      }
  };
  scan(v.rho);
  scan(v.phi);
  for (int j = 0; j < grid_.dim; ++j) scan(v.u[j]);
  if (!finite) throw BlowUpError("solver: non-finite spectral coefficients", t_);
}

void Solver::step(double dt) {
  if (!(dt > 0.0)) throw StepSizeError("solver: dt must be positive");
  if (opts_.scheme == Scheme::if_rk4 || !have_prev_ || prev_dt_ != dt) {
    step_if_rk4(dt);
  } else {
    step_bdf2(dt);
  }
}

void Solver::step_if_rk4(double dt) {
  const Grid& g = grid_;
  const int d = g.dim;
  const std::size_t ns = g.spec_size();
  const std::vector<double>& k2 = w_->k2;

  const SpecState k1 = explicit_rhs(v_);
  const double limit =
      opts_.cfl_safety * std::min(g.h() / std::max(w_->max_speed, 1e-300), 1.0 / p_.alpha);
  if (dt > limit * (1.0 + 1e-12))
    throw StepSizeError("solver: dt = " + std::to_string(dt) + " exceeds the CFL limit " +
                        std::to_string(limit));

  const double eu = std::exp(-p_.alpha * dt), eu2 = std::exp(-0.5 * p_.alpha * dt);
  auto ephi = [&](std::size_t s, double frac) {
    return std::exp(-(p_.b + p_.D * k2[s]) * dt * frac);
  };
  const double h = dt;

  SpecState stage = zeros_like(g);
  // a = E_half (v + h/2 k1)
  for (std::size_t s = 0; s < ns; ++s) {
    stage.rho[s] = v_.rho[s] + 0.5 * h * k1.rho[s];
    stage.phi[s] = ephi(s, 0.5) * (v_.phi[s] + 0.5 * h * k1.phi[s]);
    for (int j = 0; j < d; ++j) stage.u[j][s] = eu2 * (v_.u[j][s] + 0.5 * h * k1.u[j][s]);
  }
  const SpecState k2s = explicit_rhs(stage);
  // b = E_half v + h/2 k2
  for (std::size_t s = 0; s < ns; ++s) {
    stage.rho[s] = v_.rho[s] + 0.5 * h * k2s.rho[s];
    stage.phi[s] = ephi(s, 0.5) * v_.phi[s] + 0.5 * h * k2s.phi[s];
    for (int j = 0; j < d; ++j) stage.u[j][s] = eu2 * v_.u[j][s] + 0.5 * h * k2s.u[j][s];
  }
  const SpecState k3 = explicit_rhs(stage);
  // c = E v + h E_half k3
  for (std::size_t s = 0; s < ns; ++s) {
    stage.rho[s] = v_.rho[s] + h * k3.rho[s];
    stage.phi[s] = ephi(s, 1.0) * v_.phi[s] + h * ephi(s, 0.5) * k3.phi[s];
    for (int j = 0; j < d; ++j) stage.u[j][s] = eu * v_.u[j][s] + h * eu2 * k3.u[j][s];
  }
  const SpecState k4 = explicit_rhs(stage);

  SpecState next = zeros_like(g);
  for (std::size_t s = 0; s < ns; ++s) {
    next.rho[s] = v_.rho[s] + h / 6.0 * (k1.rho[s] + 2.0 * (k2s.rho[s] + k3.rho[s]) + k4.rho[s]);
    const double e1 = ephi(s, 1.0), e2 = ephi(s, 0.5);
    next.phi[s] = e1 * v_.phi[s] +
                  h / 6.0 * (e1 * k1.phi[s] + 2.0 * e2 * (k2s.phi[s] + k3.phi[s]) + k4.phi[s]);
    for (int j = 0; j < d; ++j)
      next.u[j][s] = eu * v_.u[j][s] +
                     h / 6.0 * (eu * k1.u[j][s] + 2.0 * eu2 * (k2s.u[j][s] + k3.u[j][s]) +
                                k4.u[j][s]);
  }
  check_state(next);

  v_prev_ = std::move(v_);
  r_prev_ = k1;
  prev_dt_ = dt;
  have_prev_ = true;
  v_ = std::move(next);
  t_ += dt;
}

void Solver::step_bdf2(double dt) {
  const Grid& g = grid_;
  const int d = g.dim;
  const std::size_t ns = g.spec_size();
  const SpecState rn = explicit_rhs(v_);
  const double limit =
      opts_.cfl_safety * std::min(g.h() / std::max(w_->max_speed, 1e-300), 1.0 / p_.alpha);
  if (dt > limit * (1.0 + 1e-12))
    throw StepSizeError("solver: dt = " + std::to_string(dt) + " exceeds the CFL limit " +
                        std::to_string(limit));
  const double h = dt;
  SpecState next = zeros_like(g);
  for (std::size_t s = 0; s < ns; ++s) {
    auto combine = [&](C vn, C vp, C r0, C r1, double L) {
      return (4.0 * vn - vp + 2.0 * h * (2.0 * r0 - r1)) / (3.0 - 2.0 * h * L);
    };
    next.rho[s] = combine(v_.rho[s], v_prev_.rho[s], rn.rho[s], r_prev_.rho[s], 0.0);
    next.phi[s] = combine(v_.phi[s], v_prev_.phi[s], rn.phi[s], r_prev_.phi[s],
                          -(p_.b + p_.D * w_->k2[s]));
    for (int j = 0; j < d; ++j)
      next.u[j][s] = combine(v_.u[j][s], v_prev_.u[j][s], rn.u[j][s], r_prev_.u[j][s], -p_.alpha);
  }
  check_state(next);
  v_prev_ = std::move(v_);
  r_prev_ = rn;
  v_ = std::move(next);
  t_ += dt;
}

EnergyN Solver::energy_EN(int N, double kappa) {
  if (N < 1) throw DomainError("energy_EN: N must be >= 1");
  Work& w = *w_;
  const Grid& g = grid_;
  const int d = g.dim;
  const std::size_t ns = g.spec_size(), nr = g.real_size();
  const double rb = eq_.rho_bar;
  const double dV = g.cell_volume();
  Fft& fft = w.fft;

  RealField rho_phys;
  fft.inverse(v_.rho, rho_phys);
  RealField wrho(nr), wu(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    const double r = rb + rho_phys[i];
    wrho[i] = p_.dP(r) / r;
    wu[i] = r;
  }

  double E = 0.0;
  SpecField buf(ns);
  RealField phys;
  std::vector<double> weight(ns);
  for (const auto& l : multi_indices(d, N)) {
    for (std::size_t s = 0; s < ns; ++s) buf[s] = derivative_symbol(w.k[s].data(), l) * v_.rho[s];
    fft.inverse(buf, phys);
    double acc = 0.0;
    for (std::size_t i = 0; i < nr; ++i) acc += wrho[i] * phys[i] * phys[i];
    E += acc * dV;
    for (int j = 0; j < d; ++j) {
      for (std::size_t s = 0; s < ns; ++s)
        buf[s] = derivative_symbol(w.k[s].data(), l) * v_.u[j][s];
      fft.inverse(buf, phys);
      acc = 0.0;
      for (std::size_t i = 0; i < nr; ++i) acc += wu[i] * phys[i] * phys[i];
      E += acc * dV;
    }
    for (std::size_t s = 0; s < ns; ++s)
      weight[s] = std::norm(derivative_symbol(w.k[s].data(), l));
    E += -2.0 * p_.mu * weighted_parseval(g, v_.phi, v_.rho, weight) +
         p_.b * p_.mu / p_.a * weighted_parseval(g, v_.phi, v_.phi, weight);
  }

  std::vector<double> wN(ns), wN1(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    double kk[3];
    g.wavevector(s, kk);
    wN[s] = sobolev_weight(kk, d, N);
    wN1[s] = sobolev_weight(kk, d, N - 1);
  }
  std::vector<double> gradN(ns), gradN1(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    gradN[s] = w.k2[s] * wN[s];
    gradN1[s] = w.k2[s] * wN1[s];
  }
  E += p_.mu * p_.D / p_.a * weighted_parseval(g, v_.phi, v_.phi, gradN);

  double cross = 0.0;
  for (int j = 0; j < d; ++j) {
    for (std::size_t s = 0; s < ns; ++s) buf[s] = kI * w.k[s][j] * v_.rho[s];
    cross += weighted_parseval(g, v_.u[j], buf, wN1);
  }
  E += kappa * (cross + p_.mu / (2.0 * p_.a) * weighted_parseval(g, v_.phi, v_.phi, gradN1));

  double D = 0.0;
  for (int j = 0; j < d; ++j) D += weighted_parseval(g, v_.u[j], v_.u[j], wN);
  D += weighted_parseval(g, v_.rho, v_.rho, gradN1) + weighted_parseval(g, v_.phi, v_.phi, gradN);
  return {E, D};
}

Diagnostics Solver::diagnostics(int N, double kappa) {
  Work& w = *w_;
  const Grid& g = grid_;
  const int d = g.dim;
  const std::size_t ns = g.spec_size(), nr = g.real_size();
  const double rb = eq_.rho_bar;
  const double dV = g.cell_volume();
  Fft& fft = w.fft;

  Diagnostics out;
  out.t = t_;
  out.mass = g.volume() * (rb + v_.rho[0].real());

  RealField rho2, phi2;
  std::array<RealField, 3> u;
  fft.inverse(v_.rho, rho2);
  fft.inverse(v_.phi, phi2);
  for (int j = 0; j < d; ++j) fft.inverse(v_.u[j], u[j]);

  double kinetic = 0.0, potential = 0.0, linf_rho = 0.0, linf_u = 0.0;
  for (std::size_t i = 0; i < nr; ++i) {
    const double r = rb + rho2[i];
    double u2 = 0.0;
    for (int j = 0; j < d; ++j) u2 += u[j][i] * u[j][i];
    kinetic += r * u2;
    potential += potential_G(p_, eq_, r);
    linf_rho = std::max(linf_rho, std::abs(rho2[i]));
    linf_u = std::max(linf_u, std::sqrt(u2));
  }
  kinetic *= dV;
  potential *= dV;

  double grad_phi2 = 0.0, grad_rho2 = 0.0;
  SpecField phit(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const double wgt = g.hermitian_weight(s);
    grad_phi2 += wgt * w.k2[s] * std::norm(v_.phi[s]);
    grad_rho2 += wgt * w.k2[s] * std::norm(v_.rho[s]);
    phit[s] = p_.a * v_.rho[s] - (p_.b + p_.D * w.k2[s]) * v_.phi[s];
  }
  grad_phi2 *= g.volume();
  grad_rho2 *= g.volume();

  const double l2_phi2 = parseval_l2_squared(g, v_.phi);
  const double l2_rho2 = parseval_l2_squared(g, v_.rho);
  double l2_u2 = 0.0;
  for (int j = 0; j < d; ++j) l2_u2 += parseval_l2_squared(g, v_.u[j]);

  if (p_.mu > 0.0) {
    out.F = kinetic / (2.0 * p_.mu) + potential / p_.mu +
            (p_.D * grad_phi2 + p_.b * l2_phi2) / (2.0 * p_.a) - parseval_inner(g, v_.rho, v_.phi);
    out.dissipation_u = p_.alpha / p_.mu * kinetic;
  } else {
    out.F = std::numeric_limits<double>::quiet_NaN();
    out.dissipation_u = std::numeric_limits<double>::quiet_NaN();
  }
  out.dissipation_phi = parseval_l2_squared(g, phit) / p_.a;
  out.l2_rho = std::sqrt(l2_rho2);
  out.l2_u = std::sqrt(l2_u2);
  out.l2_phi = std::sqrt(l2_phi2);
  out.linf_rho = linf_rho;
  out.linf_u = linf_u;
  out.h1_rho = std::sqrt(l2_rho2 + grad_rho2);
  if (N >= 1) {
    const EnergyN en = energy_EN(N, kappa);
    out.E_N = en.E;
    out.D_N = en.D;
  }
  return out;
}

FieldState init_data(const Grid& g, const ModelParams& p, const Equilibrium& eq,
                     const InitFamily& family, InitReport* report) {
  g.validate();
  p.validate();
  const std::size_t nr = g.real_size();
  FieldState s;
  s.grid = g;
  s.t = 0.0;
  s.rho.assign(nr, eq.rho_bar);
  s.phi.assign(nr, eq.phi_bar);
  for (int j = 0; j < g.dim; ++j) s.u[j].assign(nr, 0.0);

  auto add_bump = [&](RealField& f, const GaussianBump& b) {
    if (b.amplitude == 0.0) return;
    if (!(b.width > 0.0)) throw DomainError("init_data: gaussian width must be positive");
    std::array<double, 3> c{0.5 * g.length, 0.5 * g.length, 0.5 * g.length};
    if (b.center) c = *b.center;
    for (std::size_t i = 0; i < nr; ++i) {
      double x[3];
      g.position(i, x);
      double r2 = 0.0;
      for (int j = 0; j < g.dim; ++j) r2 += (x[j] - c[j]) * (x[j] - c[j]);
      f[i] += b.amplitude * std::exp(-r2 / (2.0 * b.width * b.width));
    }
  };
  add_bump(s.rho, family.rho);
  add_bump(s.phi, family.phi);
  for (int j = 0; j < g.dim; ++j) add_bump(s.u[j], family.u[j]);

  if (family.noise_amplitude != 0.0) {
    std::mt19937_64 rng(family.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    RealField noise(nr);
    for (auto& x : noise) x = normal(rng);
    Fft fft(g);
    SpecField spec = fft.forward(noise);
    spec[0] = 0.0;
    for (std::size_t q = 0; q < spec.size(); ++q) {
      double k[3];
      g.wavevector(q, k);
      const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
      spec[q] *= std::exp(-0.5 * k2 * family.noise_width * family.noise_width);
    }
    dealias(g, spec);
    fft.inverse(spec, noise);
    double peak = 0.0;
    for (double x : noise) peak = std::max(peak, std::abs(x));
    if (peak > 0.0)
      for (std::size_t i = 0; i < nr; ++i) s.rho[i] += family.noise_amplitude * noise[i] / peak;
  }

  double min_rho = std::numeric_limits<double>::infinity();
  for (double r : s.rho) min_rho = std::min(min_rho, r);
  if (!(min_rho > 0.0)) throw DomainError("init_data: initial density has vacuum");

  if (report) {
    const double dV = g.cell_volume();
    double l1 = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      l1 += std::abs(s.rho[i] - eq.rho_bar) + std::abs(s.phi[i] - eq.phi_bar);
      for (int j = 0; j < g.dim; ++j) l1 += std::abs(s.u[j][i]);
    }
    report->l1 = l1 * dV;
    Fft fft(g);
    RealField tmp(nr);
    double h4 = 0.0;
    auto add_h4 = [&](const RealField& f, double shift, bool with_grad) {
      for (std::size_t i = 0; i < nr; ++i) tmp[i] = f[i] - shift;
      const SpecField spec = fft.forward(tmp);
      for (std::size_t q = 0; q < spec.size(); ++q) {
        double k[3];
        g.wavevector(q, k);
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        const double w4 = sobolev_weight(k, g.dim, 4);
        h4 += g.hermitian_weight(q) * std::norm(spec[q]) * w4 * (with_grad ? 1.0 + k2 : 1.0);
      }
    };
    add_h4(s.rho, eq.rho_bar, false);
    add_h4(s.phi, eq.phi_bar, true);
    for (int j = 0; j < g.dim; ++j) add_h4(s.u[j], 0.0, false);
    report->h4 = std::sqrt(h4 * g.volume());
  }
  return s;
}

FieldState rhs(const ModelParams& p, const Equilibrium& eq, const FieldState& s,
               const SolverOptions& opts) {
  Solver solver(p, eq, s.grid, opts);
  solver.set_state(s);
  const SpecState r = solver.full_rhs(solver.spectra());
  Fft fft(s.grid);
  FieldState out;
  out.grid = s.grid;
  out.t = s.t;
  fft.inverse(r.rho, out.rho);
  fft.inverse(r.phi, out.phi);
  for (int j = 0; j < s.grid.dim; ++j) fft.inverse(r.u[j], out.u[j]);
  return out;
}

FieldState step(const ModelParams& p, const Equilibrium& eq, const FieldState& s, double dt,
                Scheme scheme) {
  SolverOptions opts;
  opts.scheme = scheme;
  Solver solver(p, eq, s.grid, opts);
  solver.set_state(s);
  solver.step(dt);
  return solver.state();
}

EnergyN energy_EN(const ModelParams& p, const Equilibrium& eq, const FieldState& s, int N,
                  double kappa) {
  Solver solver(p, eq, s.grid);
  solver.set_state(s);
  return solver.energy_EN(N, kappa);
}

SimulationResult simulate(const ModelParams& p, const Equilibrium& eq, const FieldState& s0,
                          const SimulationOptions& opts) {
  if (!(opts.dt > 0.0)) throw DomainError("simulate: dt must be positive");
  if (opts.sample_stride < 1) throw DomainError("simulate: sample_stride must be >= 1");
  if (!(opts.t_end >= s0.t)) throw DomainError("simulate: t_end precedes the initial time");

  Solver solver(p, eq, s0.grid, opts.solver);
  solver.set_state(s0);
  const Grid& g = s0.grid;

  SimulationResult res;
  res.cutoff = boundary_cutoff(g, p, eq);
  double t_stop = opts.t_end;
  if (opts.enforce_cutoff && res.cutoff < t_stop) {
    t_stop = res.cutoff;
    res.status = "cutoff";
  }
  const long steps = static_cast<long>(std::floor((t_stop - s0.t) / opts.dt + 1e-9));

  const SpecField rho0_hat = solver.spectra().rho;
  int samples = 0;
  auto record = [&] {
    res.series.push_back(solver.diagnostics(opts.diagnostics_order, opts.kappa));
    if (opts.compare_wave) {
      const double tw = solver.time() - s0.t;
      const WaveSpectra wv = diffusion_wave_spectra(p, eq, g, rho0_hat, tw);
      const SpecState& v = solver.spectra();
      WaveComparison wc;
      wc.t = solver.time();
      const std::size_t ns = g.spec_size();
      SpecField diff(ns);
      for (std::size_t s = 0; s < ns; ++s) diff[s] = v.rho[s] - wv.rho[s];
      wc.l2_rho_minus_wave = std::sqrt(parseval_l2_squared(g, diff));
      RealField phys = Fft(g).inverse(diff);
      for (double x : phys) wc.linf_rho_minus_wave = std::max(wc.linf_rho_minus_wave, std::abs(x));
      for (std::size_t s = 0; s < ns; ++s) diff[s] = v.phi[s] - wv.phi[s];
      wc.l2_phi_minus_wave = std::sqrt(parseval_l2_squared(g, diff));
      double du = 0.0, uw = 0.0;
      for (int j = 0; j < g.dim; ++j) {
        for (std::size_t s = 0; s < ns; ++s) diff[s] = v.u[j][s] - wv.u[j][s];
        du += parseval_l2_squared(g, diff);
        uw += parseval_l2_squared(g, wv.u[j]);
      }
      wc.l2_u_minus_wave = std::sqrt(du);
      wc.l2_u_wave = std::sqrt(uw);
      wc.l2_rho_wave = std::sqrt(parseval_l2_squared(g, wv.rho));
      res.wave.push_back(wc);
    }
    if (opts.snapshot_stride > 0 && opts.on_snapshot && samples % opts.snapshot_stride == 0)
      opts.on_snapshot(solver.state());
    ++samples;
  };

  try {
    record();
    for (long i = 1; i <= steps; ++i) {
      solver.step(opts.dt);
      if (i % opts.sample_stride == 0 || i == steps) record();
    }
  } catch (const BlowUpError& e) {
    res.completed = false;
    res.status = std::string("blowup: ") + e.what();
    res.blowup_time = e.time();
  } catch (const StepSizeError& e) {
    res.completed = false;
    res.status = std::string("step_size: ") + e.what();
  }
  res.t_final = solver.time();
  res.final_state = solver.state();
  return res;
}

namespace {
void put(std::ostream& os, double v) {
  if (std::isnan(v))
    os << "nan";
  else
    os << v;
}
}  // namespace

void write_diagnostics_csv(std::ostream& os, const std::vector<Diagnostics>& rows) {
  os << "t,mass,F,dissipation_u,dissipation_phi,l2_rho,l2_u,l2_phi,linf_rho,linf_u,h1_rho,E_N,D_N\n";
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    const double vals[] = {r.t, r.mass, r.F, r.dissipation_u, r.dissipation_phi, r.l2_rho,
                           r.l2_u, r.l2_phi, r.linf_rho, r.linf_u, r.h1_rho, r.E_N, r.D_N};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      if (i) os << ',';
      put(os, vals[i]);
    }
    os << '\n';
  }
  os.precision(old);
}

void write_wave_csv(std::ostream& os, const std::vector<WaveComparison>& rows) {
  os << "t,l2_rho_wave,l2_u_wave,l2_rho_minus_wave,l2_u_minus_wave,l2_phi_minus_wave,"
        "linf_rho_minus_wave\n";
  const auto old = os.precision(17);
  for (const auto& r : rows)
    os << r.t << ',' << r.l2_rho_wave << ',' << r.l2_u_wave << ',' << r.l2_rho_minus_wave << ','
       << r.l2_u_minus_wave << ',' << r.l2_phi_minus_wave << ',' << r.linf_rho_minus_wave << '\n';
  os.precision(old);
}

}  // namespace vasc
