#include "vasc/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "vasc/errors.hpp"

namespace vasc {

namespace {
constexpr Complex kI{0.0, 1.0};

double k2_of(const WaveVector& k) { return k.k[0] * k.k[0] + k.k[1] * k.k[1] + k.k[2] * k.k[2]; }

// Smallest generalised eigenvalue of (S, H) for Hermitian S and positive
// definite H, restricted to the leading `dim` coordinates.
double min_generalised_eigenvalue(const Mat5c& S, const Mat5c& H, int dim) {
  const Eigen::MatrixXcd Hs = H.topLeftCorner(dim, dim);
  const Eigen::MatrixXcd Ss = S.topLeftCorner(dim, dim);
  Eigen::LLT<Eigen::MatrixXcd> llt(Hs);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd Linv =
      llt.matrixL().solve(Eigen::MatrixXcd::Identity(dim, dim));
  Eigen::MatrixXcd C = Linv * Ss * Linv.adjoint();
  C = 0.5 * (C + C.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double min_eigenvalue(const Mat5c& H, int dim) {
  Eigen::MatrixXcd Hs = H.topLeftCorner(dim, dim);
  Hs = 0.5 * (Hs + Hs.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hs, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

WaveVector along_x(double kmag) { return WaveVector{{kmag, 0.0, 0.0}}; }

}  // namespace

Mat5c lyapunov_form(const ModelParams& p, const Equilibrium& eq, double kappa,
                    const WaveVector& k) {
  const double k2 = k2_of(k);
  const double rb = eq.rho_bar;
  const double w = kappa / (1.0 + k2);
  Mat5c H = Mat5c::Zero();
  H(0, 0) = p.dP(rb) / rb;
  for (int j = 1; j <= 3; ++j) H(j, j) = rb;
  H(4, 4) = p.mu * p.D / p.a * k2 + p.b * p.mu / p.a + w * p.mu / (2.0 * p.a) * k2;
  H(0, 4) = H(4, 0) = -p.mu;
  for (int j = 0; j < 3; ++j) {
    const Complex h = w * (-kI * k.k[j]) / 2.0;
    H(0, j + 1) = h;
    H(j + 1, 0) = std::conj(h);
  }
  return H;
}

Mat5c mode_generator(const ModelParams& p, const Equilibrium& eq, const WaveVector& k) {
  const double rb = eq.rho_bar;
  const double k2 = k2_of(k);
  Mat5c M = Mat5c::Zero();
  for (int j = 0; j < 3; ++j) {
    M(0, j + 1) = -rb * kI * k.k[j];
    M(j + 1, 0) = -p.dP(rb) / rb * kI * k.k[j];
    M(j + 1, j + 1) = -p.alpha;
    M(j + 1, 4) = p.mu * kI * k.k[j];
  }
  M(4, 0) = p.a;
  M(4, 4) = -(p.b + p.D * k2);
  return M;
}

double instantaneous_rate(const ModelParams& p, const Equilibrium& eq, double kappa,
                          const WaveVector& k, bool reduced) {
  const Mat5c H = lyapunov_form(p, eq, kappa, k);
  const Mat5c M = mode_generator(p, eq, k);
  const Mat5c S = -(H * M + M.adjoint() * H);
  return min_generalised_eigenvalue(S, H, reduced ? 4 : 5);
}

std::vector<double> lyapunov_k_samples() {
  std::vector<double> ks{0.0, 0.01, 0.1, 1.0, 10.0};
  const int n = 161;
  for (int i = 0; i < n; ++i) ks.push_back(std::pow(10.0, -3.0 + 4.0 * i / (n - 1)));
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

LyapunovWeights kappa_select(const ModelParams& p, const Equilibrium& eq) {
  const DerivedCoeffs dc = stability_check(p, eq);
  if (!dc.stable)
    throw StabilityError("kappa_select: b P'(rho_bar) - a mu rho_bar <= 0, no Lyapunov functional");
  const bool reduced = p.mu == 0.0;
  const int dim = reduced ? 4 : 5;
  const auto ks = lyapunov_k_samples();

  for (int level = 1; level <= 40; ++level) {
    const double kappa = std::ldexp(1.0, -level);
    bool definite = true;
    double lambda = std::numeric_limits<double>::infinity();
    double c_low = std::numeric_limits<double>::infinity();
    double c_high = 0.0;
    for (double km : ks) {
      const WaveVector k = along_x(km);
      const Mat5c H = lyapunov_form(p, eq, kappa, k);
      if (!(min_eigenvalue(H, dim) > 0.0)) {
        definite = false;
        break;
      }
      Mat5c W = Mat5c::Identity();
      W(4, 4) = 1.0 + km * km;
      c_low = std::min(c_low, min_generalised_eigenvalue(H, W, dim));
      c_high = std::max(c_high, -min_generalised_eigenvalue(-H, W, dim));
      if (km > 0.0) {
        const double r = instantaneous_rate(p, eq, kappa, k, reduced);
        lambda = std::min(lambda, r * (1.0 + km * km) / (km * km));
      }
    }
    if (definite && lambda > 0.0 && std::isfinite(lambda)) {
      LyapunovWeights w;
      w.params = p;
      w.eq = eq;
      w.kappa = kappa;
      w.lambda = lambda;
      w.c_low = c_low;
      w.c_high = c_high;
      w.reduced = reduced;
      return w;
    }
  }
  throw NumericError("kappa_select: no admissible kappa down to 2^-40");
}

ModeEnergy mode_energy(const LyapunovWeights& w, const WaveVector& k, const ModeState& m) {
  const ModelParams& p = w.params;
  const double rb = w.eq.rho_bar;
  const double k2 = k2_of(k);
  ModeEnergy e;
  double u2 = 0.0;
  for (const auto& c : m.u) u2 += std::norm(c);
  if (w.reduced) {
    e.base = p.dP(rb) / rb * std::norm(m.rho) + rb * u2;
  } else {
    e.base = p.dP(rb) / rb * std::norm(m.rho) + rb * u2 +
             (p.mu * p.D / p.a * k2 + p.b * p.mu / p.a) * std::norm(m.phi) -
             2.0 * p.mu * std::real(m.phi * std::conj(m.rho));
  }
  // Re(u . conj(i k rho))
  Complex cross = 0.0;
  for (int j = 0; j < 3; ++j) cross += m.u[j] * std::conj(kI * k.k[j] * m.rho);
  e.kappa_part = std::real(cross) / (1.0 + k2);
  if (!w.reduced) e.kappa_part += p.mu / (2.0 * p.a) * k2 / (1.0 + k2) * std::norm(m.phi);
  e.kappa_part *= w.kappa;
  e.value = e.base + e.kappa_part;
  return e;
}

DissipationReport dissipation_check(const LyapunovWeights& w, const WaveVector& k,
                                    const ModeState& m0, double horizon, double dt,
                                    std::vector<DissipationSample>* trace, double tolerance) {
  if (!(dt > 0.0) || !(horizon >= 0.0))
    throw DomainError("dissipation_check: dt must be positive and horizon non-negative");
  const double kmag = k.magnitude();
  const double rate = w.lambda * kmag * kmag / (1.0 + kmag * kmag);
  const LongitudinalPropagator prop(w.params, w.eq, kmag);
  const double e0 = mode_energy(w, k, m0).value;

  DissipationReport rep;
  rep.kmag = kmag;
  const auto steps = static_cast<long>(std::ceil(horizon / dt - 1e-12));
  for (long i = 0; i <= steps; ++i) {
    const double t = std::min(horizon, i * dt);
    const ModeState m = mode_evolve_linear(prop, w.params.alpha, k, m0, t);
    const double e = mode_energy(w, k, m).value;
    const double env = e0 * std::exp(-rate * t);
    double ratio = 0.0;
    if (env > 0.0)
      ratio = e / env;
    else if (e > 0.0)
      ratio = std::numeric_limits<double>::infinity();
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst_t = t;
    }
    if (trace) trace->push_back({kmag, t, e, env, ratio});
  }
  rep.passed = rep.max_ratio <= 1.0 + tolerance;
  return rep;
}

void write_dissipation_csv(std::ostream& os, std::span<const DissipationSample> rows) {
  os << "kmag,t,energy,envelope,ratio\n";
  const auto old = os.precision(17);
  for (const auto& r : rows)
    os << r.kmag << ',' << r.t << ',' << r.energy << ',' << r.envelope << ',' << r.ratio << '\n';
  os.precision(old);
}

}  // namespace vasc
