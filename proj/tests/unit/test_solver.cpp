#include <doctest.h>

#include <cmath>

#include "vasc/errors.hpp"
#include "vasc/grid.hpp"
#include "vasc/solver.hpp"
#include "vasc/spectral.hpp"

using namespace vasc;

namespace {
const ModelParams P0 = canonical_params();
const Equilibrium EQ0 = make_equilibrium(P0, 1.0);

FieldState bump_1d(double amp, int n = 256, double L = 100.0) {
  InitFamily fam;
  fam.rho = {amp, 4.0, std::nullopt};
  fam.u[0] = {0.5 * amp, 5.0, std::nullopt};
  return init_data(Grid{1, n, L}, P0, EQ0, fam);
}

double max_diff(const RealField& a, const RealField& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}
}  // namespace

TEST_CASE("ground state is a steady state") {
  const FieldState s = bump_1d(0.0);
  for (Scheme sc : {Scheme::if_rk4, Scheme::imex_bdf2}) {
    Solver solver(P0, EQ0, s.grid, SolverOptions{sc});
    solver.set_state(s);
    for (int i = 0; i < 5; ++i) solver.step(0.1);
    const FieldState out = solver.state();
    CHECK(max_diff(out.rho, s.rho) < 1e-15);
    CHECK(max_diff(out.phi, s.phi) < 1e-15);
  }
}

TEST_CASE("initial data and vacuum rejection") {
  InitReport rep;
  InitFamily fam;
  fam.rho = {0.2, 3.0, std::nullopt};
  const FieldState s = init_data(Grid{1, 128, 50.0}, P0, EQ0, fam, &rep);
  CHECK(rep.l1 > 0.0);
  CHECK(rep.h4 > 0.0);
  double peak = 0.0;
  for (double r : s.rho) peak = std::max(peak, r - 1.0);
  CHECK(peak == doctest::Approx(0.2).epsilon(1e-3));
  fam.rho.amplitude = -1.5;
  CHECK_THROWS_AS(init_data(Grid{1, 128, 50.0}, P0, EQ0, fam), DomainError);
}

TEST_CASE("mass is conserved by both schemes") {
  for (Scheme sc : {Scheme::if_rk4, Scheme::imex_bdf2}) {
    SimulationOptions so;
    so.dt = 0.1;
    so.t_end = 5.0;
    so.solver.scheme = sc;
    so.diagnostics_order = 0;
    const SimulationResult r = simulate(P0, EQ0, bump_1d(0.1), so);
    REQUIRE(r.completed);
    for (const auto& d : r.series)
      CHECK(std::abs(d.mass - r.series.front().mass) <= 1e-12 * r.series.front().mass);
  }
}

TEST_CASE("relative energy decreases") {
  SimulationOptions so;
  so.dt = 0.05;
  so.t_end = 10.0;
  so.diagnostics_order = 0;
  const SimulationResult r = simulate(P0, EQ0, bump_1d(0.1), so);
  REQUIRE(r.completed);
  for (std::size_t i = 1; i < r.series.size(); ++i)
    CHECK(r.series[i].F <= r.series[i - 1].F + 1e-14);
}

TEST_CASE("tiny perturbation follows the linear propagator") {
  const FieldState s0 = bump_1d(1e-7);
  Solver solver(P0, EQ0, s0.grid);
  solver.set_state(s0);
  const SpecState v0 = solver.spectra();
  for (int i = 0; i < 20; ++i) solver.step(0.05);
  const SpecState& v = solver.spectra();
  const Grid& g = s0.grid;
  double err = 0.0, scale = 0.0;
  for (std::size_t q = 0; q < g.spec_size(); ++q) {
    double k[3];
    g.wavevector(q, k);
    ModeState m0;
    m0.rho = v0.rho[q];
    m0.u[0] = v0.u[0][q];
    m0.phi = v0.phi[q];
    int m[3];
    g.modes(q, m);
    if (m[0] == g.n / 2) continue;  // Nyquist carries no odd derivative
    const ModeState y = mode_evolve_linear(P0, EQ0, WaveVector{{k[0], 0, 0}}, m0, 1.0);
    err = std::max({err, std::abs(y.rho - v.rho[q]), std::abs(y.u[0] - v.u[0][q]),
                    std::abs(y.phi - v.phi[q])});
    scale = std::max(scale, m0.norm());
  }
  CHECK(err / scale < 1e-6);
}

TEST_CASE("time step above the CFL limit is refused without touching the state") {
  const FieldState s0 = bump_1d(0.1, 256, 20.0);
  Solver solver(P0, EQ0, s0.grid);
  solver.set_state(s0);
  const double lim = solver.cfl_limit();
  const FieldState before = solver.state();
  CHECK_THROWS_AS(solver.step(2.0 * lim), StepSizeError);
  CHECK(solver.time() == 0.0);
  CHECK(max_diff(solver.state().rho, before.rho) == 0.0);
  CHECK_NOTHROW(solver.step(0.9 * lim));
}

TEST_CASE("conservative and advective density forms agree to high order") {
  const FieldState s0 = bump_1d(0.05);
  const FieldState a = rhs(P0, EQ0, s0, SolverOptions{});
  SolverOptions adv;
  adv.advective_density = true;
  const FieldState b = rhs(P0, EQ0, s0, adv);
  CHECK(max_diff(a.rho, b.rho) < 1e-8);
}

TEST_CASE("IF-RK4 order four and SBDF2 order two") {
  const FieldState s0 = bump_1d(0.1, 256, 100.0);
  auto run = [&](Scheme sc, double dt) {
    Solver solver(P0, EQ0, s0.grid, SolverOptions{sc});
    solver.set_state(s0);
    const int steps = static_cast<int>(std::lround(2.0 / dt));
    for (int i = 0; i < steps; ++i) solver.step(dt);
    return solver.state();
  };
  const FieldState ref = run(Scheme::if_rk4, 0.00625);
  const double e1 = max_diff(run(Scheme::if_rk4, 0.1).rho, ref.rho);
  const double e2 = max_diff(run(Scheme::if_rk4, 0.05).rho, ref.rho);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.1));
  const double b1 = max_diff(run(Scheme::imex_bdf2, 0.1).rho, ref.rho);
  const double b2 = max_diff(run(Scheme::imex_bdf2, 0.05).rho, ref.rho);
  CHECK(std::log2(b1 / b2) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("cutoff stops the run and diagnostics record it") {
  SimulationOptions so;
  so.dt = 0.05;
  so.t_end = 1e6;
  so.sample_stride = 20;
  so.diagnostics_order = 0;
  const FieldState s0 = bump_1d(0.01, 64, 16.0);
  const SimulationResult r = simulate(P0, EQ0, s0, so);
  CHECK(r.status == "cutoff");
  CHECK(r.cutoff == doctest::Approx(4.0));
  CHECK(r.t_final <= r.cutoff + 1e-9);
  CHECK(boundary_cutoff(Grid{3, 64, 200.0}, P0, EQ0) == doctest::Approx(625.0));
}

TEST_CASE("E_N grows with the derivative order") {
  const FieldState s0 = bump_1d(0.05);
  const EnergyN e0 = energy_EN(P0, EQ0, s0, 1, 0.0);
  const EnergyN e2 = energy_EN(P0, EQ0, s0, 2, 0.0);
  CHECK(e0.E > 0.0);
  CHECK(e2.E >= e0.E);
  CHECK(e2.D >= 0.0);
}
