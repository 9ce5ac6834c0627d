#pragma once

// Experiment configuration: a sectioned key = value text format.
//
//   [model]    mu alpha D a b rho_bar pressure.kind pressure.K pressure.gamma
//   [grid]     dim n length
//   [time]     dt t_end scheme sample_stride
//   [init]     {rho,u_x,u_y,u_z,phi}.{amplitude,width,center} noise.amplitude
//              noise.width seed
//   [analysis] fit.lo fit.hi q r0 diagnostics_order
//   [linear]   rho_amplitude u_amplitude width t_min t_max samples
//   [output]   out_dir snapshot_stride
//
// Every key is optional and defaults to the canonical parameter set. Unknown
// sections or keys are errors.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vasc/analysis.hpp"
#include "vasc/grid.hpp"
#include "vasc/model.hpp"
#include "vasc/solver.hpp"

namespace vasc {

struct BumpConfig {
  double amplitude = 0.0;
  double width = 1.0;
  std::optional<std::array<double, 3>> center;
  bool operator==(const BumpConfig&) const = default;
};

struct ExperimentConfig {
  // model
  double mu = 1.0, alpha = 1.0, D = 1.0, a = 1.0, b = 1.0, rho_bar = 1.0;
  std::string pressure_kind = "quadratic";
  double pressure_K = 2.0, pressure_gamma = 2.0;
  // grid
  int dim = 1;
  int n = 256;
  double length = 200.0;
  // time
  double dt = 0.1;
  double t_end = 10.0;
  std::string scheme = "if_rk4";
  int sample_stride = 10;
  // init
  BumpConfig rho{0.01, 5.0, std::nullopt};
  std::array<BumpConfig, 3> u{};
  BumpConfig phi{};
  double noise_amplitude = 0.0, noise_width = 1.0;
  std::uint64_t seed = 0;
  // analysis
  double fit_lo = 10.0, fit_hi = kInf;
  std::vector<double> q{2.0, kInf};
  double r0 = 0.5;
  int diagnostics_order = 2;
  // linear
  double linear_rho_amplitude = 1.0, linear_u_amplitude = 1.0, linear_width = 0.0;
  double linear_t_min = 10.0, linear_t_max = 1000.0;
  int linear_samples = 40;
  // output
  std::string out_dir = "out";
  int snapshot_stride = 0;

  bool operator==(const ExperimentConfig&) const = default;

  ModelParams model() const;
  Equilibrium equilibrium() const;
  Grid grid() const;
  InitFamily init_family() const;
  FitWindow fit_window() const;
  RadialProfile radial_profile() const;

  /// Checks every value against the module preconditions; throws ConfigError
  /// naming the offending key.
  void validate() const;
};

/// Throws ConfigError with "section.key" (and line number) on malformed input.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& c);

/// 64-bit FNV-1a of the serialised config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace vasc
