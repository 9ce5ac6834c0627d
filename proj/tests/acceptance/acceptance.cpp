// Acceptance checks, one PASS/FAIL line per criterion. Arguments select a
// subset of criteria by number; with none, all run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vasc/analysis.hpp"
#include "vasc/grid.hpp"
#include "vasc/lyapunov.hpp"
#include "vasc/solver.hpp"
#include "vasc/spectral.hpp"
#include "vasc/verify.hpp"

using namespace vasc;

namespace {

const ModelParams P0 = canonical_params();
const Equilibrium EQ0 = make_equilibrium(P0, 1.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string f(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double max_diff(const RealField& a, const RealField& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// ---- 1 ------------------------------------------------------------------

Outcome spectrum_asymptotics() {
  const double sigma = stability_check(P0, EQ0).sigma;
  std::vector<double> ratio, lk, l2, l3;
  for (double k : {0.2, 0.1, 0.05, 0.025}) {
    const Roots r = labelled_roots(P0, EQ0, k);
    ratio.push_back(std::abs(r[0] + sigma * k * k) / std::pow(k, 4));
    lk.push_back(std::log(k));
    l2.push_back(std::log(std::abs(r[1] + P0.b)));
    l3.push_back(std::log(std::abs(r[2] + P0.alpha)));
  }
  const double spread = *std::max_element(ratio.begin(), ratio.end()) /
                        *std::min_element(ratio.begin(), ratio.end());
  const double s2 = slope(lk, l2), s3 = slope(lk, l3);
  return {spread < 4.0 && s2 >= 0.8 && s3 >= 0.8,
          "remainder spread " + f(spread) + ", slopes " + f(s2) + ", " + f(s3)};
}

// ---- 2 ------------------------------------------------------------------

Outcome propagator_equivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst_rk = 0.0, worst_putzer = 0.0;
  int compared = 0;
  for (int i = 0; i < 20; ++i) {
    const ModelParams p = oracle::random_stable_params(rng);
    const Equilibrium eq = make_equilibrium(p, 0.5 + U(rng));
    const double k = 0.01 + 4.0 * U(rng), t = 0.1 + 4.9 * U(rng);
    const Mat3c A = assemble_A(p, eq, k);
    const LongitudinalPropagator prop(p, eq, k);
    const Mat3c E = prop.at(t);
    worst_rk = std::max(worst_rk, oracle::rel_err(E, oracle::rk4_exp(A, t, 1e-4)));
    const SpectralDecomposition d = decompose(p, eq, k);
    if (d.separated) {
      ++compared;
      const Mat3c Ep = propagator_putzer(A, d.lambda, t);
      worst_putzer = std::max(worst_putzer, oracle::rel_err(Ep, propagator(d, t)));
    }
  }
  return {worst_rk <= 1e-8 && worst_putzer <= 1e-9 && compared > 0,
          "vs RK4 " + f(worst_rk, 3) + ", Putzer vs projections " + f(worst_putzer, 3) + " (" +
              std::to_string(compared) + " draws)"};
}

// ---- 3 ------------------------------------------------------------------

Outcome lyapunov_certificate() {
  const LyapunovWeights w = kappa_select(P0, EQ0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  double worst = 0.0;
  for (double k : {0.01, 0.1, 1.0, 10.0}) {
    double fastest = P0.alpha;
    for (const auto& z : solve_cubic(characteristic_coeffs(P0, EQ0, k)).roots)
      fastest = std::max(fastest, std::abs(z));
    const double dt = 0.1 / fastest;
    for (int i = 0; i < 50; ++i) {
      ModeState m;
      m.rho = {N(rng), N(rng)};
      m.phi = {N(rng), N(rng)};
      for (auto& c : m.u) c = {N(rng), N(rng)};
      worst = std::max(worst, dissipation_check(w, WaveVector{{k, 0, 0}}, m, 20.0, dt).max_ratio);
    }
  }
  return {w.kappa > 0.0 && w.lambda > 0.0 && worst <= 1.0 + 1e-8,
          "kappa " + f(w.kappa) + ", lambda " + f(w.lambda) + ", max ratio " + f(worst, 12)};
}

// ---- 4, 5 ---------------------------------------------------------------

double linear_exponent(Quantity q, double norm) {
  const auto times = log_times(10.0, 1000.0, 40);
  const TimeSeries ts = linear_decay_curve(P0, EQ0, RadialProfile{}, times, q, norm);
  return fit_decay(ts, FitWindow{10.0, 1000.0}).exponent;
}

Outcome linear_decay() {
  const double r = linear_exponent(Quantity::rho, 2.0);
  const double u = linear_exponent(Quantity::u, 2.0);
  const double dr = linear_exponent(Quantity::rho_minus_wave, 2.0);
  const double du = linear_exponent(Quantity::u_minus_wave, 2.0);
  return {within(r, -0.75, 0.05) && within(u, -1.25, 0.05) && within(dr, -1.25, 0.08) &&
              within(du, -1.75, 0.08),
          "rho " + f(r) + ", u " + f(u) + ", rho-wave " + f(dr) + ", u-wave " + f(du)};
}

Outcome linf_envelope() {
  const double r = linear_exponent(Quantity::rho, kInf);
  return {within(r, -1.5, 0.08), "rho L-inf envelope " + f(r)};
}

// ---- 6 ------------------------------------------------------------------

FieldState gaussian_state(const Grid& g, double amp, double width, double u_amp = 0.0) {
  InitFamily fam;
  fam.rho = {amp, width, std::nullopt};
  fam.u[0] = {u_amp, width, std::nullopt};
  return init_data(g, P0, EQ0, fam);
}

double energy_residual(double dt) {
  const Grid g{1, 1024, 400.0};
  SimulationOptions so;
  so.dt = dt;
  so.t_end = 4.0;
  so.sample_stride = 1;
  so.diagnostics_order = 0;
  so.enforce_cutoff = false;
  const SimulationResult r = simulate(P0, EQ0, gaussian_state(g, 0.1, 3.0, 0.05), so);
  if (!r.completed) return NAN;
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 1; i + 1 < r.series.size(); ++i) {
    const auto& a = r.series[i - 1];
    const auto& b = r.series[i];
    const auto& c = r.series[i + 1];
    worst = std::max(worst, std::abs((c.F - a.F) / (c.t - a.t) + b.dissipation_u + b.dissipation_phi));
    scale = std::max(scale, b.dissipation_u + b.dissipation_phi);
  }
  return worst / scale;
}

Outcome solver_validation() {
  std::string detail;
  bool ok = true;

  // (a) mass, three dimensions
  {
    const Grid g{3, 64, 200.0};
    SimulationOptions so;
    so.dt = 0.4;
    so.t_end = 40.0;
    so.sample_stride = 10;
    so.diagnostics_order = 0;
    const SimulationResult r = simulate(P0, EQ0, gaussian_state(g, 0.05, 5.0, 0.02), so);
    double drift = 0.0;
    for (const auto& d : r.series)
      drift = std::max(drift, std::abs(d.mass / r.series.front().mass - 1.0));
    const bool pass = r.completed && drift <= 1e-12;
    ok &= pass;
    detail += "(a) mass drift " + f(drift, 3) + (pass ? "" : " FAIL");
  }
  // (b) energy identity residual under dt halving
  {
    const double r1 = energy_residual(0.05), r2 = energy_residual(0.025),
                 r3 = energy_residual(0.0125);
    const double o1 = std::log2(r1 / r2), o2 = std::log2(r2 / r3);
    const bool pass = o1 >= 1.8 && o2 >= 1.8;
    ok &= pass;
    detail += "; (b) energy residual orders " + f(o1, 3) + ", " + f(o2, 3) + (pass ? "" : " FAIL");
  }
  // (c) amplitude 1e-6 against the mode-wise propagator at t = 1
  {
    const Grid g{3, 64, 200.0};
    const FieldState s0 = gaussian_state(g, 1e-6, 8.0, 5e-7);
    Solver solver(P0, EQ0, g);
    solver.set_state(s0);
    const SpecState v0 = solver.spectra();
    for (int i = 0; i < 20; ++i) solver.step(0.05);
    const SpecState& v = solver.spectra();
    double err = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < g.spec_size(); ++q) {
      int m[3];
      g.modes(q, m);
      if (m[0] == g.n / 2 || std::abs(m[1]) == g.n / 2 || std::abs(m[2]) == g.n / 2) continue;
      double k[3];
      g.wavevector(q, k);
      ModeState m0;
      m0.rho = v0.rho[q];
      m0.phi = v0.phi[q];
      for (int j = 0; j < 3; ++j) m0.u[j] = v0.u[j][q];
      const ModeState y = mode_evolve_linear(P0, EQ0, WaveVector{{k[0], k[1], k[2]}}, m0, 1.0);
      ModeState x;
      x.rho = v.rho[q];
      x.phi = v.phi[q];
      for (int j = 0; j < 3; ++j) x.u[j] = v.u[j][q];
      err = std::max(err, (x - y).norm());
      scale = std::max(scale, y.norm());
    }
    const double rel = err / scale;
    const bool pass = rel <= 1e-6;
    ok &= pass;
    detail += "; (c) linear mismatch " + f(rel, 3) + (pass ? "" : " FAIL");
  }
  // (d) IF-RK4 self-convergence at d = 1, n = 1024
  {
    const Grid g{1, 1024, 400.0};
    const FieldState s0 = gaussian_state(g, 0.1, 3.0, 0.05);
    auto run = [&](double dt) {
      Solver solver(P0, EQ0, g);
      solver.set_state(s0);
      const long steps = std::lround(4.0 / dt);
      for (long i = 0; i < steps; ++i) solver.step(dt);
      return solver.state();
    };
    const FieldState ref = run(0.1 / 32.0);
    const double e1 = max_diff(run(0.1).rho, ref.rho);
    const double e2 = max_diff(run(0.05).rho, ref.rho);
    const double e3 = max_diff(run(0.025).rho, ref.rho);
    const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    const bool pass = within(o1, 4.0, 0.3) && within(o2, 4.0, 0.3);
    ok &= pass;
    detail += "; (d) RK4 orders " + f(o1, 3) + ", " + f(o2, 3) + (pass ? "" : " FAIL");
  }
  return {ok, detail};
}

// ---- 7 ------------------------------------------------------------------

struct DecayRun {
  double rho = NAN, u = NAN, drho = NAN, du = NAN;
  std::string status;
};

DecayRun nonlinear_decay(const Grid& g, double dt, double width, double fit_lo, int stride) {
  const FieldState s0 = gaussian_state(g, 0.01, width);
  SimulationOptions so;
  so.dt = dt;
  so.t_end = boundary_cutoff(g, P0, EQ0);
  so.sample_stride = stride;
  so.diagnostics_order = 0;
  so.compare_wave = true;
  const SimulationResult r = simulate(P0, EQ0, s0, so);
  DecayRun out;
  out.status = r.status;
  if (!r.completed) return out;
  TimeSeries rho, u, drho, du;
  for (std::size_t i = 0; i < r.series.size(); ++i) {
    const double t = r.series[i].t;
    for (TimeSeries* ts : {&rho, &u, &drho, &du}) ts->times.push_back(t);
    rho.values.push_back(r.series[i].l2_rho);
    u.values.push_back(r.series[i].l2_u);
    drho.values.push_back(r.wave[i].l2_rho_minus_wave);
    du.values.push_back(r.wave[i].l2_u_minus_wave);
  }
  const FitWindow win{fit_lo, kInf};
  out.rho = fit_decay(rho, win, true).exponent;
  out.u = fit_decay(u, win, true).exponent;
  out.drho = fit_decay(drho, win, true).exponent;
  out.du = fit_decay(du, win, true).exponent;
  return out;
}

bool decay_ok(const DecayRun& r, int d) {
  const double base = -d / 4.0;
  return within(r.rho, base, 0.15) && within(r.u, base - 0.5, 0.15) && r.drho <= r.rho - 0.3 &&
         r.du <= r.u - 0.3;
}

std::string decay_detail(const DecayRun& r) {
  if (std::isnan(r.rho)) return "run did not complete (" + r.status + ")";
  return "rho " + f(r.rho) + ", u " + f(r.u) + ", rho-wave " + f(r.drho) + ", u-wave " + f(r.du);
}

bool only_1d = false;  // set by VASC_ACCEPTANCE_1D_ONLY for quick iterations

Outcome nonlinear_decay_3d() {
  const DecayRun r3 = only_1d ? DecayRun{} : nonlinear_decay(Grid{3, 64, 200.0}, 0.4, 5.0, 60.0, 10);
  const DecayRun r1 = nonlinear_decay(Grid{1, 512, 200.0}, 0.1, 5.0, 60.0, 20);
  const bool ok3 = decay_ok(r3, 3), ok1 = decay_ok(r1, 1);
  return {ok3 && ok1, "3D: " + decay_detail(r3) + (ok3 ? "" : " FAIL") + "; 1D: " +
                          decay_detail(r1) + (ok1 ? "" : " FAIL")};
}

// ---- 8 ------------------------------------------------------------------

Outcome property_suite() {
  VerifyOptions vo;
  vo.scratch_dir = std::filesystem::temp_directory_path().string();
  const auto results = run_verify(vo);
  std::string failed;
  for (const auto& r : results)
    if (r.status == CheckStatus::fail) failed += " " + r.name;
  bool ok = all_passed(results);
  std::string detail = std::to_string(results.size()) + " checks" +
                       (failed.empty() ? "" : ", failed:" + failed);
#ifdef VASC_CLI_PATH
  const auto out = std::filesystem::temp_directory_path() / "vasc_acceptance_verify";
  const std::string cmd =
      std::string("\"") + VASC_CLI_PATH + "\" --out \"" + out.string() + "\" verify > /dev/null";
  const int rc = std::system(cmd.c_str());
  const int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  ok &= code == 0;
  detail += ", CLI exit code " + std::to_string(code);
#endif
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  only_1d = std::getenv("VASC_ACCEPTANCE_1D_ONLY") != nullptr;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"spectrum asymptotics", spectrum_asymptotics},
      {"propagator oracle equivalence", propagator_equivalence},
      {"Lyapunov certification", lyapunov_certificate},
      {"whole-space linear decay", linear_decay},
      {"L-inf envelope", linf_envelope},
      {"nonlinear solver validation", solver_validation},
      {"nonlinear decay reproduction", nonlinear_decay_3d},
      {"property suite", property_suite},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first
              << "): " << o.detail << " [" << f(secs, 3) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
