#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vasc/errors.hpp"
#include "vasc/spectral.hpp"

using namespace vasc;

namespace {

const ModelParams P0 = canonical_params();
const Equilibrium EQ0 = make_equilibrium(P0, 1.0);

double max_root_error(const Roots& got, std::vector<Complex> want) {
  double worst = 0.0;
  for (const auto& z : got) {
    auto it = std::min_element(want.begin(), want.end(), [&](Complex x, Complex y) {
      return std::abs(x - z) < std::abs(y - z);
    });
    worst = std::max(worst, std::abs(*it - z));
    want.erase(it);
  }
  return worst;
}

CubicCoeffs from_roots(Complex a, Complex b, Complex c) {
  return {-(a + b + c).real(), (a * b + a * c + b * c).real(), -(a * b * c).real()};
}

}  // namespace

TEST_CASE("cubic solver on constructed roots") {
  SUBCASE("three distinct real roots") {
    const CubicRoots r = solve_cubic(from_roots(-1.0, -2.0, -3.0));
    CHECK(r.cls == RootClass::three_real);
    CHECK(r.discriminant > 0.0);
    CHECK(max_root_error(r.roots, {-1.0, -2.0, -3.0}) < 1e-12);
  }
  SUBCASE("complex pair") {
    const Complex z{-0.5, 2.0};
    const CubicRoots r = solve_cubic(from_roots(-4.0, z, std::conj(z)));
    CHECK(r.cls == RootClass::one_real_pair_complex);
    CHECK(r.discriminant < 0.0);
    CHECK(max_root_error(r.roots, {-4.0, z, std::conj(z)}) < 1e-12);
    CHECK(r.roots[1].imag() > 0.0);  // pair ordered Im > 0 first
  }
  SUBCASE("triple root takes the degenerate path") {
    const CubicRoots r = solve_cubic(from_roots(-1.0, -1.0, -1.0));
    CHECK(r.cls == RootClass::degenerate);
    CHECK(max_root_error(r.roots, {-1.0, -1.0, -1.0}) < 1e-4);
  }
  SUBCASE("discriminant formula") {
    // (x-1)(x-2)(x-3): Delta = prod (ri - rj)^2 = 4
    CHECK(discriminant(from_roots(1.0, 2.0, 3.0)) == doctest::Approx(4.0));
  }
}

TEST_CASE("cubic solver agrees with companion eigenvalues on random draws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const CubicCoeffs c{U(rng), U(rng), U(rng)};
    Eigen::Matrix3d C;
    C << 0, 0, -c.c0, 1, 0, -c.c1, 0, 1, -c.c2;
    const Eigen::Vector3cd ev = C.eigenvalues();
    const double tol = 1e-8 * (1.0 + ev.cwiseAbs().maxCoeff());
    CHECK(max_root_error(solve_cubic(c).roots, {ev[0], ev[1], ev[2]}) < tol);
  }
}

TEST_CASE("characteristic polynomial matches det(lambda I - A)") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const ModelParams p = oracle::random_stable_params(rng);
    const Equilibrium eq = make_equilibrium(p, 1.3);
    const double k = 0.1 + 0.2 * i;
    const Mat3c A = assemble_A(p, eq, k);
    const CubicCoeffs c = characteristic_coeffs(p, eq, k);
    for (Complex z : {Complex(0.3, 0.1), Complex(-2.0, 1.0), Complex(1.5, 0.0)}) {
      const Complex det = (z * Mat3c::Identity() - A).determinant();
      CHECK(std::abs(det - c.eval(z)) < 1e-10 * (1.0 + std::abs(det)));
    }
  }
}

TEST_CASE("small-k roots follow the asymptotic branches") {
  const double sigma = 1.0;
  std::vector<double> r1;
  for (double k : {0.2, 0.1, 0.05, 0.025}) {
    const Roots r = labelled_roots(P0, EQ0, k);
    r1.push_back(std::abs(r[0] + sigma * k * k) / std::pow(k, 4));
    CHECK(std::abs(r[1] + P0.b) < 2.0 * k);
    CHECK(std::abs(r[2] + P0.alpha) < 2.0 * k);
  }
  CHECK(*std::max_element(r1.begin(), r1.end()) / *std::min_element(r1.begin(), r1.end()) < 4.0);
  const Roots pred = asymptotic_roots(P0, EQ0, 0.1);
  CHECK(pred[0].real() == doctest::Approx(-0.01));
  CHECK(pred[1].real() == doctest::Approx(-1.0));
}

TEST_CASE("labelled branches are continuous in k") {
  ModelParams p = P0;
  p.alpha = 2.0;  // separates lambda_2 and lambda_3 at k = 0
  const Equilibrium eq = make_equilibrium(p, 1.0);
  Roots prev = labelled_roots(p, eq, 0.3);
  for (double k = 0.3; k < 8.0; k *= 1.03) {
    const Roots cur = labelled_roots(p, eq, k);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(cur[j] - prev[j]) < 0.5 * std::max(1.0, k));
    prev = cur;
  }
}

TEST_CASE("projections reproduce A and the identity") {
  for (double k : {0.05, 0.5, 2.0, 9.0}) {
    const SpectralDecomposition d = decompose(P0, EQ0, k);
    REQUIRE(d.separated);
    const Mat3c A = assemble_A(P0, EQ0, k);
    Mat3c sum = Mat3c::Zero(), rec = Mat3c::Zero();
    for (int j = 0; j < 3; ++j) {
      sum += d.projections[j];
      rec += d.lambda[j] * d.projections[j];
      for (int l = 0; l < 3; ++l) {
        const Mat3c prod = d.projections[j] * d.projections[l];
        const Mat3c want = j == l ? d.projections[j] : Mat3c::Zero();
        CHECK((prod - want).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
    CHECK((sum - Mat3c::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((rec - A).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + A.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("propagator matches the Pade exponential and RK4") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const ModelParams p = oracle::random_stable_params(rng);
    const Equilibrium eq = make_equilibrium(p, 0.5 + U(rng));
    const double k = 3.0 * U(rng) + 0.01, t = 2.0 * U(rng);
    const Mat3c A = assemble_A(p, eq, k);
    const Mat3c E = LongitudinalPropagator(p, eq, k).at(t);
    CHECK(oracle::rel_err(E, oracle::expm(A, t)) < 1e-10);
    CHECK(oracle::rel_err(E, oracle::rk4_exp(A, t, 1e-3)) < 1e-8);
  }
}

TEST_CASE("Putzer handles a repeated root") {
  // Jordan block with a triple eigenvalue: exp(Jt) = e^{-t}(I + Nt + N^2 t^2/2).
  Mat3c J;
  J << -1, 0, 0, 1, -1, 0, 0, 1, -1;
  const Roots l{Complex(-1.0), Complex(-1.0), Complex(-1.0)};
  for (double t : {0.0, 0.3, 2.0, 10.0}) {
    CHECK(oracle::rel_err(propagator_putzer(J, l, t), oracle::expm(J, t)) < 1e-12);
  }
  CHECK_THROWS_AS(eigenprojections(J, l), DegenerateError);
}

TEST_CASE("divided differences of exp") {
  const Roots l{Complex(-0.5), Complex(-2.0), Complex(-3.0, 1.0)};
  const double t = 1.7;
  const auto dd = exp_divided_differences(l, t);
  auto e = [&](Complex z) { return std::exp(z * t); };
  const Complex d01 = (e(l[0]) - e(l[1])) / (l[0] - l[1]);
  const Complex d12 = (e(l[1]) - e(l[2])) / (l[1] - l[2]);
  CHECK(std::abs(dd[0] - e(l[0])) < 1e-14);
  CHECK(std::abs(dd[1] - d01) < 1e-13);
  CHECK(std::abs(dd[2] - (d01 - d12) / (l[0] - l[2])) < 1e-13);
  // Confluent limit is exp' = t e^{lt}.
  const Roots c{Complex(-1.0), Complex(-1.0 + 1e-9), Complex(-4.0)};
  CHECK(std::abs(exp_divided_differences(c, t)[1] - t * std::exp(-t)) < 1e-8);
}

TEST_CASE("full mode evolution solves the linear ODE") {
  const WaveVector k{{0.3, -0.4, 0.5}};
  ModeState m0;
  m0.rho = {1.0, 0.5};
  m0.u = {Complex(0.2, -0.1), Complex(-0.3, 0.0), Complex(0.1, 0.4)};
  m0.phi = {-0.7, 0.2};
  // RK4 on the five-component generator as the oracle
  ModeState x = m0;
  const double t = 2.5, h = 1e-3;
  auto add = [](const ModeState& a, const ModeState& b, double s) {
    ModeState r = a;
    r.rho += s * b.rho;
    r.phi += s * b.phi;
    for (int j = 0; j < 3; ++j) r.u[j] += s * b.u[j];
    return r;
  };
  for (int i = 0; i < static_cast<int>(t / h + 0.5); ++i) {
    const ModeState k1 = linear_generator(P0, EQ0, k, x);
    const ModeState k2 = linear_generator(P0, EQ0, k, add(x, k1, 0.5 * h));
    const ModeState k3 = linear_generator(P0, EQ0, k, add(x, k2, 0.5 * h));
    const ModeState k4 = linear_generator(P0, EQ0, k, add(x, k3, h));
    x = add(add(add(add(x, k1, h / 6), k2, h / 3), k3, h / 3), k4, h / 6);
  }
  const ModeState y = mode_evolve_linear(P0, EQ0, k, m0, t);
  CHECK((y - x).norm() < 1e-10);
}

TEST_CASE("k = 0 mode: rho conserved, phi relaxes, u damped") {
  ModeState m0;
  m0.rho = 2.0;
  m0.u[0] = 1.0;
  m0.phi = 0.0;
  const ModeState y = mode_evolve_linear(P0, EQ0, WaveVector{}, m0, 1.0);
  CHECK(std::abs(y.rho - 2.0) < 1e-14);
  CHECK(std::abs(y.u[0] - std::exp(-1.0)) < 1e-14);
  // phi' = a rho - b phi with phi(0) = 0
  CHECK(std::abs(y.phi - 2.0 * (1.0 - std::exp(-1.0))) < 1e-13);
}

TEST_CASE("diffusion-wave mode and error envelope") {
  const WaveVector k{{0.1, 0.0, 0.0}};
  const ModeState w = wave_profile_mode(P0, EQ0, k, 1.0, 5.0);
  CHECK(std::abs(w.rho - std::exp(-0.01 * 5.0)) < 1e-14);
  CHECK(std::abs(w.phi - w.rho) < 1e-14);
  ModeState m0;
  m0.rho = 1.0;
  m0.phi = 1.0;
  const ErrorRatios r = error_bound_ratio(P0, EQ0, k, m0, 5.0, ErrorProbe{10.0, 0.1});
  CHECK(r.ratio_rho < 1.0);
  CHECK_THROWS_AS(error_bound_ratio(P0, EQ0, WaveVector{{1.0, 0, 0}}, m0, 1.0, ErrorProbe{}),
                  DomainError);
}

TEST_CASE("spectrum sweep CSV") {
  const std::vector<double> ks{0.01, 0.1, 1.0};
  const auto rows = spectrum_sweep(P0, EQ0, ks);
  REQUIRE(rows.size() == 3);
  std::ostringstream os;
  write_spectrum_csv(os, rows);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header.rfind("kmag,re_lambda1,im_lambda1", 0) == 0);
  int lines = 0;
  for (std::string l; std::getline(is, l);) ++lines;
  CHECK(lines == 3);
}
