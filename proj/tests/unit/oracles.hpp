#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "vasc/model.hpp"

namespace oracle {

using Mat3c = Eigen::Matrix3cd;

// exp(A t) by classical RK4 on dX/dt = A X with fixed step h.
template <class M>
M rk4_exp(const M& A, double t, double h) {
  M X = M::Identity(A.rows(), A.cols());
  const long steps = static_cast<long>(std::ceil(t / h - 1e-12));
  const double dt = steps > 0 ? t / steps : 0.0;
  for (long i = 0; i < steps; ++i) {
    const M k1 = A * X;
    const M k2 = A * (X + 0.5 * dt * k1);
    const M k3 = A * (X + 0.5 * dt * k2);
    const M k4 = A * (X + dt * k3);
    X += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return X;
}

// Pade-based matrix exponential from Eigen's unsupported module.
inline Mat3c expm(const Mat3c& A, double t) { return (A * t).exp(); }

inline double rel_err(const Mat3c& X, const Mat3c& Y) {
  return (X - Y).cwiseAbs().maxCoeff() / std::max(1e-300, Y.cwiseAbs().maxCoeff());
}

// Random parameter set with a positive stability margin.
inline vasc::ModelParams random_stable_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.2, 2.5);
  for (;;) {
    vasc::ModelParams p;
    p.mu = U(rng);
    p.alpha = U(rng);
    p.D = U(rng);
    p.a = U(rng);
    p.b = U(rng);
    p.pressure = vasc::PressureLaw::quadratic(0.5 + 2.0 * U(rng));
    if (p.b * p.pressure.K * 2.0 - p.a * p.mu > 0.1) return p;
  }
}

}  // namespace oracle
