#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "vasc/spectral.hpp"

namespace vasc {

const char* to_string(RootClass c) {
  switch (c) {
    case RootClass::three_real: return "three_real";
    case RootClass::one_real_pair_complex: return "one_real_pair_complex";
    case RootClass::degenerate: return "degenerate";
  }
  return "unknown";
}

double discriminant(const CubicCoeffs& c) {
  const double c2 = c.c2, c1 = c.c1, c0 = c.c0;
  return 18.0 * c2 * c1 * c0 - 4.0 * c2 * c2 * c2 * c0 + c2 * c2 * c1 * c1 -
         4.0 * c1 * c1 * c1 - 27.0 * c0 * c0;
}

namespace {

// Root scale of the monic cubic; the discriminant is homogeneous of degree 6
// in it.
double root_scale(const CubicCoeffs& c) {
  return std::max({std::abs(c.c2), std::sqrt(std::abs(c.c1)), std::cbrt(std::abs(c.c0)),
                   1e-300});
}

Complex polish(const CubicCoeffs& c, Complex z) {
  for (int it = 0; it < 3; ++it) {
    const Complex g = c.eval(z);
    const Complex dg = c.derivative(z);
    if (std::abs(dg) == 0.0) break;
    const Complex next = z - g / dg;
    if (!(std::abs(c.eval(next)) < std::abs(g))) break;
    z = next;
  }
  return z;
}

Roots companion_roots(const CubicCoeffs& c) {
  Eigen::Matrix3d comp;
  comp << 0.0, 0.0, -c.c0,
          1.0, 0.0, -c.c1,
          0.0, 1.0, -c.c2;
  Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
  Roots r;
  for (int i = 0; i < 3; ++i) r[i] = es.eigenvalues()[i];
  return r;
}

void canonical_order(Roots& r) {
  std::sort(r.begin(), r.end(), [](Complex x, Complex y) {
    const bool xr = std::abs(x.imag()) == 0.0, yr = std::abs(y.imag()) == 0.0;
    if (xr != yr) return xr;
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
}

}  // namespace

CubicRoots solve_cubic(const CubicCoeffs& c) {
  CubicRoots out;
  out.discriminant = discriminant(c);
  const double scale = root_scale(c);
  const double tol = 1e-11 * std::pow(scale, 6);

  if (std::abs(out.discriminant) <= tol) {
    out.cls = RootClass::degenerate;
    out.degenerate_fallback = true;
    out.roots = companion_roots(c);
    for (auto& z : out.roots) {
      if (std::abs(z.imag()) <= 1e-7 * scale) z.imag(0.0);
    }
    canonical_order(out.roots);
    return out;
  }

  const double shift = c.c2 / 3.0;
  const double p = c.c1 - c.c2 * c.c2 / 3.0;
  const double q = 2.0 * c.c2 * c.c2 * c.c2 / 27.0 - c.c2 * c.c1 / 3.0 + c.c0;

  if (out.discriminant > 0.0) {
    out.cls = RootClass::three_real;
    // p < 0 whenever three distinct real roots exist.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int j = 0; j < 3; ++j) {
      const double y = m * std::cos(theta - 2.0 * std::numbers::pi * j / 3.0);
      out.roots[j] = Complex(y - shift, 0.0);
    }
    for (auto& z : out.roots) z = Complex(polish(c, z).real(), 0.0);
  } else {
    out.cls = RootClass::one_real_pair_complex;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    const double A = -std::copysign(std::cbrt(std::abs(q) / 2.0 + std::sqrt(disc)), q);
    const double B = (A != 0.0) ? -p / (3.0 * A) : 0.0;
    double r = A + B - shift;
    r = polish(c, Complex(r, 0.0)).real();
    const double beta = c.c2 + r;
    const double gamma = (std::abs(r) > 1e-3 * scale) ? -c.c0 / r : c.c1 + r * beta;
    const double re = -beta / 2.0;
    const double im = std::sqrt(std::max(gamma - beta * beta / 4.0, 0.0));
    out.roots[0] = Complex(r, 0.0);
    out.roots[1] = polish(c, Complex(re, im));
    out.roots[2] = std::conj(out.roots[1]);
  }
  canonical_order(out.roots);
  return out;
}

}  // namespace vasc
