#include "vasc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "vasc/errors.hpp"

namespace vasc {

namespace {
constexpr Complex kI{0.0, 1.0};

double dot3(const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }
}  // namespace

double WaveVector::magnitude() const { return std::sqrt(dot3(k, k)); }

Vec3 WaveVector::direction() const {
  const double m = magnitude();
  if (m == 0.0) throw DomainError("WaveVector: direction undefined at k = 0");
  return {k[0] / m, k[1] / m, k[2] / m};
}

double ModeState::norm() const {
  double s = std::norm(rho) + std::norm(phi);
  for (const auto& c : u) s += std::norm(c);
  return std::sqrt(s);
}

ModeState operator-(const ModeState& x, const ModeState& y) {
  ModeState d;
  d.rho = x.rho - y.rho;
  d.phi = x.phi - y.phi;
  for (int j = 0; j < 3; ++j) d.u[j] = x.u[j] - y.u[j];
  return d;
}

Mat3c assemble_A(const ModelParams& p, const Equilibrium& eq, double kmag) {
  const double k2 = kmag * kmag;
  const double rb = eq.rho_bar;
  Mat3c A;
  A << 0.0, -rb, 0.0,
       p.dP(rb) / rb * k2, -p.alpha, -p.mu * k2,
       p.a, 0.0, -p.b - p.D * k2;
  return A;
}

CubicCoeffs characteristic_coeffs(const ModelParams& p, const Equilibrium& eq, double kmag) {
  const double k2 = kmag * kmag;
  const double dP = p.dP(eq.rho_bar);
  CubicCoeffs c;
  c.c2 = p.b + p.D * k2 + p.alpha;
  c.c1 = p.b * p.alpha + p.D * p.alpha * k2 + dP * k2;
  c.c0 = (p.b + p.D * k2) * dP * k2 - p.a * p.mu * eq.rho_bar * k2;
  return c;
}

Roots asymptotic_roots(const ModelParams& p, const Equilibrium& eq, double kmag) {
  const double sigma = stability_check(p, eq).sigma;
  return {Complex(-sigma * kmag * kmag, 0.0), Complex(-p.b, 0.0), Complex(-p.alpha, 0.0)};
}

namespace {

// Assign roots to the targets greedily: lambda_1 first, then lambda_2; ties
// between a conjugate pair go to the one with Im >= 0.
Roots label_by_proximity(const Roots& raw, const Roots& target) {
  std::array<bool, 3> used{false, false, false};
  Roots out{};
  for (int j = 0; j < 2; ++j) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      if (used[i]) continue;
      const double d = std::abs(raw[i] - target[j]);
      const double tie = 1e-12 * std::max(1.0, std::abs(target[j]));
      if (d < best_d - tie ||
          (std::abs(d - best_d) <= tie && best >= 0 && raw[i].imag() > raw[best].imag())) {
        best = i;
        best_d = d;
      }
    }
    used[best] = true;
    out[j] = raw[best];
  }
  for (int i = 0; i < 3; ++i)
    if (!used[i]) out[2] = raw[i];
  return out;
}

Roots match_continuation(const Roots& prev, const Roots& raw) {
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 6; ++s) {
    double cost = 0.0;
    for (int j = 0; j < 3; ++j) cost += std::norm(raw[perms[s][j]] - prev[j]);
    if (cost < best_cost) {
      best_cost = cost;
      best = s;
    }
  }
  return {raw[perms[best][0]], raw[perms[best][1]], raw[perms[best][2]]};
}

constexpr double kLabelRadius = 0.5;
constexpr double kContinuationRatio = 1.02;

}  // namespace

Roots labelled_roots(const ModelParams& p, const Equilibrium& eq, double kmag) {
  if (kmag < 0.0) throw DomainError("labelled_roots: kmag must be >= 0");
  const double k0 = std::min(kmag, kLabelRadius);
  Roots cur = label_by_proximity(solve_cubic(characteristic_coeffs(p, eq, k0)).roots,
                                 asymptotic_roots(p, eq, k0));
  if (kmag <= kLabelRadius) return cur;
  double k = kLabelRadius;
  while (k < kmag) {
    k = std::min(k * kContinuationRatio, kmag);
    cur = match_continuation(cur, solve_cubic(characteristic_coeffs(p, eq, k)).roots);
  }
  return cur;
}

std::array<Mat3c, 3> eigenprojections(const Mat3c& A, const Roots& roots, double tol_rel) {
  double radius = 0.0;
  for (const auto& z : roots) radius = std::max(radius, std::abs(z));
  double sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) sep = std::min(sep, std::abs(roots[i] - roots[j]));
  if (radius == 0.0 || sep <= tol_rel * radius)
    throw DegenerateError("eigenprojections: roots not separated");

  const Mat3c I = Mat3c::Identity();
  std::array<Mat3c, 3> P;
  for (int j = 0; j < 3; ++j) {
    Mat3c acc = I;
    for (int l = 0; l < 3; ++l) {
      if (l == j) continue;
      acc = acc * (A - roots[l] * I) / (roots[j] - roots[l]);
    }
    P[j] = acc;
  }
  return P;
}

SpectralDecomposition decompose(const ModelParams& p, const Equilibrium& eq, double kmag) {
  SpectralDecomposition d;
  const CubicCoeffs c = characteristic_coeffs(p, eq, kmag);
  const CubicRoots cr = solve_cubic(c);
  d.discriminant = cr.discriminant;
  d.cls = cr.cls;
  d.lambda = labelled_roots(p, eq, kmag);
  try {
    d.projections = eigenprojections(assemble_A(p, eq, kmag), d.lambda);
    d.separated = true;
  } catch (const DegenerateError&) {
    d.separated = false;
  }
  return d;
}

Mat3c propagator(const SpectralDecomposition& d, double t) {
  if (!d.separated) throw DegenerateError("propagator: decomposition is degenerate");
  if (t < 0.0) throw DomainError("propagator: t must be >= 0");
  Mat3c E = Mat3c::Zero();
  for (int j = 0; j < 3; ++j) E += std::exp(d.lambda[j] * t) * d.projections[j];
  return E;
}

std::array<Complex, 3> exp_divided_differences(const Roots& l, double t) {
  // Opitz: exp(t J) for the lower bidiagonal J = [l1; 1 l2; 0 1 l3] carries the
  // divided differences of exp(t z) in its first column. Scaling and squaring
  // with a Taylor core.
  Mat3c J = Mat3c::Zero();
  J(0, 0) = l[0];
  J(1, 1) = l[1];
  J(2, 2) = l[2];
  J(1, 0) = 1.0;
  J(2, 1) = 1.0;
  J *= t;
  const double norm1 = J.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Mat3c X = J / std::ldexp(1.0, squarings);
  Mat3c term = Mat3c::Identity();
  Mat3c E = Mat3c::Identity();
  for (int n = 1; n <= 24; ++n) {
    term = term * X / static_cast<double>(n);
    E += term;
  }
  for (int s = 0; s < squarings; ++s) E = E * E;
  return {E(0, 0), E(1, 0), E(2, 0)};
}

Mat3c propagator_putzer(const Mat3c& A, const Roots& roots, double t) {
  if (t < 0.0) throw DomainError("propagator_putzer: t must be >= 0");
  const auto r = exp_divided_differences(roots, t);
  const Mat3c I = Mat3c::Identity();
  const Mat3c M1 = A - roots[0] * I;
  const Mat3c M2 = M1 * (A - roots[1] * I);
  return r[0] * I + r[1] * M1 + r[2] * M2;
}

LongitudinalPropagator::LongitudinalPropagator(const ModelParams& p, const Equilibrium& eq,
                                               double kmag)
    : A_(assemble_A(p, eq, kmag)),
      roots_(solve_cubic(characteristic_coeffs(p, eq, kmag)).roots) {
  try {
    proj_ = eigenprojections(A_, roots_);
    separated_ = true;
  } catch (const DegenerateError&) {
    separated_ = false;
  }
}

Mat3c LongitudinalPropagator::at(double t) const {
  if (!separated_) return propagator_putzer(A_, roots_, t);
  Mat3c E = Mat3c::Zero();
  for (int j = 0; j < 3; ++j) E += std::exp(roots_[j] * t) * proj_[j];
  return E;
}

ModeState mode_evolve_linear(const LongitudinalPropagator& prop, double alpha,
                             const WaveVector& k, const ModeState& m0, double t) {
  if (t < 0.0) throw DomainError("mode_evolve_linear: t must be >= 0");
  const double kmag = k.magnitude();
  const double damp = std::exp(-alpha * t);
  const Mat3c E = prop.at(t);
  ModeState m;
  if (kmag == 0.0) {
    // Longitudinal velocity amplitude i k.u^ vanishes identically.
    m.rho = E(0, 0) * m0.rho + E(0, 2) * m0.phi;
    m.phi = E(2, 0) * m0.rho + E(2, 2) * m0.phi;
    for (int j = 0; j < 3; ++j) m.u[j] = damp * m0.u[j];
    return m;
  }
  const Vec3 kt = k.direction();
  const Complex ku = kt[0] * m0.u[0] + kt[1] * m0.u[1] + kt[2] * m0.u[2];
  const Complex w0 = kI * kmag * ku;  // i k . u^
  Eigen::Vector3cd v0(m0.rho, w0, m0.phi);
  const Eigen::Vector3cd v = E * v0;
  m.rho = v(0);
  m.phi = v(2);
  const Complex ku_new = v(1) / (kI * kmag);
  for (int j = 0; j < 3; ++j) {
    const Complex transverse = m0.u[j] - kt[j] * ku;
    m.u[j] = damp * transverse + kt[j] * ku_new;
  }
  return m;
}

ModeState mode_evolve_linear(const ModelParams& p, const Equilibrium& eq, const WaveVector& k,
                             const ModeState& m0, double t) {
  const LongitudinalPropagator prop(p, eq, k.magnitude());
  return mode_evolve_linear(prop, p.alpha, k, m0, t);
}

ModeState linear_generator(const ModelParams& p, const Equilibrium& eq, const WaveVector& k,
                           const ModeState& m) {
  const double rb = eq.rho_bar;
  const double k2 = dot3(k.k, k.k);
  Complex iku = 0.0;
  for (int j = 0; j < 3; ++j) iku += kI * k.k[j] * m.u[j];
  ModeState d;
  d.rho = -rb * iku;
  for (int j = 0; j < 3; ++j)
    d.u[j] = -p.dP(rb) / rb * kI * k.k[j] * m.rho - p.alpha * m.u[j] + p.mu * kI * k.k[j] * m.phi;
  d.phi = -(p.D * k2 + p.b) * m.phi + p.a * m.rho;
  return d;
}

ModeState wave_profile_mode(const ModelParams& p, const Equilibrium& eq, const WaveVector& k,
                            Complex rho0_hat, double t) {
  if (t < 0.0) throw DomainError("wave_profile_mode: t must be >= 0");
  const double sigma = stability_check(p, eq).sigma;
  const double k2 = dot3(k.k, k.k);
  ModeState m;
  m.rho = std::exp(-sigma * k2 * t) * rho0_hat;
  for (int j = 0; j < 3; ++j) m.u[j] = -(sigma / eq.rho_bar) * kI * k.k[j] * m.rho;
  m.phi = (p.a / p.b) * m.rho;
  return m;
}

namespace {

struct ModeErrors {
  double rho, u, phi;
};

ModeErrors mode_errors(const ModelParams& p, const Equilibrium& eq, const WaveVector& k,
                       const ModeState& m0, double t) {
  const ModeState m = mode_evolve_linear(p, eq, k, m0, t);
  const ModeState w = wave_profile_mode(p, eq, k, m0.rho, t);
  const ModeState d = m - w;
  double eu = 0.0;
  for (const auto& c : d.u) eu += std::norm(c);
  return {std::abs(d.rho), std::sqrt(eu), std::abs(d.phi)};
}

double envelope(double C, double lambda, double kmag, int power, double t, double u0) {
  return C * (std::pow(kmag, power) * std::exp(-lambda * kmag * kmag * t) +
              std::exp(-lambda * t)) * u0;
}

}  // namespace

ErrorRatios error_bound_ratio(const ModelParams& p, const Equilibrium& eq, const WaveVector& k,
                              const ModeState& m0, double t, const ErrorProbe& probe,
                              double r0) {
  const double kmag = k.magnitude();
  if (kmag > r0) throw DomainError("error_bound_ratio: |k| exceeds the small-frequency radius");
  const ModeErrors e = mode_errors(p, eq, k, m0, t);
  const double u0 = m0.norm();
  ErrorRatios r;
  r.err_rho = e.rho;
  r.err_u = e.u;
  r.err_phi = e.phi;
  auto ratio = [&](double err, int power) {
    const double env = envelope(probe.C, probe.lambda, kmag, power, t, u0);
    return env > 0.0 ? err / env : (err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  };
  r.ratio_rho = ratio(e.rho, 1);
  r.ratio_u = ratio(e.u, 2);
  r.ratio_phi = ratio(e.phi, 1);
  return r;
}

namespace {

// Smallest C with err <= C * envelope over the grid, for a given lambda.
template <class RequiredC>
double bisect_rate(RequiredC required_c, double slack, double lambda_hi) {
  const double base = required_c(1e-9);
  double lo = 1e-9, hi = lambda_hi;
  if (required_c(hi) <= slack * base) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (required_c(mid) <= slack * base)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

ErrorProbe calibrate_error_probe(const ModelParams& p, const Equilibrium& eq,
                                 std::span<const WaveVector> ks, std::span<const ModeState> m0s,
                                 std::span<const double> ts, double slack) {
  struct Sample {
    double kmag, t, u0, err_rho, err_u, err_phi;
  };
  std::vector<Sample> samples;
  for (const auto& k : ks)
    for (const auto& m0 : m0s)
      for (double t : ts) {
        const ModeErrors e = mode_errors(p, eq, k, m0, t);
        samples.push_back({k.magnitude(), t, m0.norm(), e.rho, e.u, e.phi});
      }
  auto required_c = [&](double lambda) {
    double c = 0.0;
    for (const auto& s : samples) {
      if (s.u0 == 0.0) continue;
      c = std::max(c, s.err_rho / envelope(1.0, lambda, s.kmag, 1, s.t, s.u0));
      c = std::max(c, s.err_u / envelope(1.0, lambda, s.kmag, 2, s.t, s.u0));
      c = std::max(c, s.err_phi / envelope(1.0, lambda, s.kmag, 1, s.t, s.u0));
    }
    return c;
  };
  ErrorProbe probe;
  probe.lambda = bisect_rate(required_c, slack, 10.0);
  probe.C = required_c(probe.lambda);
  return probe;
}

PointwiseBound certify_pointwise_bound(const ModelParams& p, const Equilibrium& eq,
                                       std::span<const WaveVector> ks,
                                       std::span<const ModeState> m0s,
                                       std::span<const double> ts, double slack) {
  struct Sample {
    double kmag, t, amp, ref;
  };
  std::vector<Sample> samples;
  for (const auto& k : ks) {
    const LongitudinalPropagator prop(p, eq, k.magnitude());
    for (const auto& m0 : m0s) {
      const double ref = m0.norm() + k.magnitude() * std::abs(m0.phi);
      for (double t : ts) {
        const ModeState m = mode_evolve_linear(prop, p.alpha, k, m0, t);
        samples.push_back({k.magnitude(), t, m.norm(), ref});
      }
    }
  }
  auto required_c = [&](double lambda) {
    double c = 0.0;
    for (const auto& s : samples) {
      if (s.ref == 0.0) continue;
      const double k2 = s.kmag * s.kmag;
      c = std::max(c, s.amp * std::exp(lambda * k2 * s.t / (1.0 + k2)) / s.ref);
    }
    return c;
  };
  PointwiseBound b;
  b.lambda = bisect_rate(required_c, slack, 10.0);
  b.C = required_c(b.lambda);
  return b;
}

std::vector<SpectrumRow> spectrum_sweep(const ModelParams& p, const Equilibrium& eq,
                                        std::span<const double> kmags) {
  std::vector<SpectrumRow> rows(kmags.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < kmags.size(); ++i) {
    const double k = kmags[i];
    const CubicRoots cr = solve_cubic(characteristic_coeffs(p, eq, k));
    rows[i].kmag = k;
    rows[i].lambda = labelled_roots(p, eq, k);
    rows[i].discriminant = cr.discriminant;
    rows[i].cls = cr.cls;
    rows[i].predicted = asymptotic_roots(p, eq, k);
  }
  return rows;
}

void write_spectrum_csv(std::ostream& os, std::span<const SpectrumRow> rows) {
  os << "kmag,re_lambda1,im_lambda1,re_lambda2,im_lambda2,re_lambda3,im_lambda3,discriminant,"
        "class,pred_lambda1,pred_lambda2,pred_lambda3,gap_lambda1,gap_lambda2,gap_lambda3\n";
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    os << r.kmag;
    for (const auto& z : r.lambda) os << ',' << z.real() << ',' << z.imag();
    os << ',' << r.discriminant << ',' << to_string(r.cls);
    for (const auto& z : r.predicted) os << ',' << z.real();
    for (int j = 0; j < 3; ++j) os << ',' << std::abs(r.lambda[j] - r.predicted[j]);
    os << '\n';
  }
  os.precision(old);
}

void write_error_ratio_csv(std::ostream& os, std::span<const ErrorRatioRow> rows) {
  os << "kmag,t,ratio_rho,ratio_u,ratio_phi\n";
  const auto old = os.precision(17);
  for (const auto& r : rows)
    os << r.kmag << ',' << r.t << ',' << r.r.ratio_rho << ',' << r.r.ratio_u << ','
       << r.r.ratio_phi << '\n';
  os.precision(old);
}

}  // namespace vasc
