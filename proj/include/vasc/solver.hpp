#pragma once

// Pseudo-spectral solver for
//   rho_t + div(rho u) = 0
//   u_t + u.grad u + P'(rho)/rho grad rho = mu grad phi - alpha u
//   phi_t = D lap phi + a rho - b phi
// on a periodic box. The state is held as dealiased spectra of the
// perturbation (rho - rho_bar, u, phi - phi_bar). The diagonal stiff part
// (-alpha on u, -(b + D|k|^2) on phi) is integrated exactly.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vasc/grid.hpp"
#include "vasc/model.hpp"

namespace vasc {

struct FieldState {
  Grid grid{};
  double t = 0.0;
  RealField rho;                // total density
  std::array<RealField, 3> u;   // first grid.dim components
  RealField phi;                // total concentration
};

struct GaussianBump {
  double amplitude = 0.0;
  double width = 1.0;                 // standard deviation
  std::optional<std::array<double, 3>> center;  // defaults to the box centre
};

struct InitFamily {
  GaussianBump rho;
  std::array<GaussianBump, 3> u;
  GaussianBump phi;
  /// Optional smooth random perturbation of rho (dealiased white noise
  /// filtered by exp(-|k|^2 width^2/2)) with the given amplitude.
  double noise_amplitude = 0.0;
  double noise_width = 1.0;
  std::uint64_t seed = 0;
};

struct InitReport {
  double l1 = 0.0;  // L1 norm of the full perturbation
  double h4 = 0.0;  // H^4 norm of the perturbation plus H^4 norm of grad phi
};

/// Gaussian perturbations of (rho_bar, 0, phi_bar). Throws DomainError on vacuum.
FieldState init_data(const Grid& g, const ModelParams& p, const Equilibrium& eq,
                     const InitFamily& family, InitReport* report = nullptr);

enum class Scheme { if_rk4, imex_bdf2 };
const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverOptions {
  Scheme scheme = Scheme::if_rk4;
  /// Advective density form -(rho) div u - u.grad rho instead of -div(rho u).
  bool advective_density = false;
  /// dt <= cfl_safety * h / max(|u| + c_s) and dt <= cfl_safety / alpha.
  double cfl_safety = 0.5;
};

struct Diagnostics {
  double t = 0.0;
  double mass = 0.0;
  double F = 0.0;
  double dissipation_u = 0.0;    // (alpha/mu) int rho |u|^2
  double dissipation_phi = 0.0;  // (1/a) int |phi_t|^2
  double l2_rho = 0.0, l2_u = 0.0, l2_phi = 0.0;
  double linf_rho = 0.0, linf_u = 0.0;
  double h1_rho = 0.0;
  double E_N = 0.0, D_N = 0.0;
};

struct EnergyN {
  double E = 0.0;
  double D = 0.0;
};

/// Spectra of the perturbation state.
struct SpecState {
  SpecField rho;
  std::array<SpecField, 3> u;
  SpecField phi;
};

class Solver {
 public:
  Solver(const ModelParams& p, const Equilibrium& eq, const Grid& g, SolverOptions opts = {});
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  void set_state(const FieldState& s);
  FieldState state() const;
  const SpecState& spectra() const { return v_; }
  double time() const { return t_; }
  const Grid& grid() const { return grid_; }

  /// Explicit part of the right-hand side (everything except the diagonal
  /// stiff operator).
  SpecState explicit_rhs(const SpecState& v);
  /// Full time derivative of the perturbation spectra.
  SpecState full_rhs(const SpecState& v);

  /// Largest admissible dt for the current state.
  double cfl_limit();
  /// Advances by dt. Throws StepSizeError above the CFL limit and BlowUpError
  /// on vacuum or non-finite values.
  void step(double dt);

  Diagnostics diagnostics(int N = 2, double kappa = 0.0);
  EnergyN energy_EN(int N, double kappa);

 private:
  struct Work;
  void step_if_rk4(double dt);
  void step_bdf2(double dt);
  void check_state(const SpecState& v);

  ModelParams p_;
  Equilibrium eq_;
  Grid grid_;
  SolverOptions opts_;
  double t_ = 0.0;
  SpecState v_;
  std::unique_ptr<Work> w_;
  // SBDF2 history
  bool have_prev_ = false;
  double prev_dt_ = 0.0;
  SpecState v_prev_, r_prev_;
};

/// Time derivative of the physical fields (drho/dt, du/dt, dphi/dt) at s.
FieldState rhs(const ModelParams& p, const Equilibrium& eq, const FieldState& s,
               const SolverOptions& opts = {});

/// One step from s.
FieldState step(const ModelParams& p, const Equilibrium& eq, const FieldState& s, double dt,
                Scheme scheme);

/// E_N and D_N of a physical state.
EnergyN energy_EN(const ModelParams& p, const Equilibrium& eq, const FieldState& s, int N,
                  double kappa);

/// Time at which a centred profile starts to interact with its periodic
/// images: (L/8)^2 / sigma.
double boundary_cutoff(const Grid& g, const ModelParams& p, const Equilibrium& eq);

struct WaveComparison {
  double t = 0.0;
  double l2_rho_wave = 0.0, l2_u_wave = 0.0;
  double l2_rho_minus_wave = 0.0, l2_u_minus_wave = 0.0, l2_phi_minus_wave = 0.0;
  double linf_rho_minus_wave = 0.0;
};

struct SimulationOptions {
  double t_end = 1.0;
  double dt = 0.1;
  int sample_stride = 1;
  SolverOptions solver{};
  int diagnostics_order = 2;
  double kappa = 0.0;
  bool compare_wave = false;
  /// Stop at boundary_cutoff(); recorded in the result.
  bool enforce_cutoff = true;
  /// Called with the state every `snapshot_stride` samples (0 disables).
  int snapshot_stride = 0;
  std::function<void(const FieldState&)> on_snapshot;
};

struct SimulationResult {
  std::vector<Diagnostics> series;
  std::vector<WaveComparison> wave;
  bool completed = true;
  std::string status = "ok";
  double cutoff = 0.0;
  double t_final = 0.0;
  std::optional<double> blowup_time;
  FieldState final_state;  // last state reached, also after an early stop
};

/// Runs to t_end (or the cutoff), sampling every sample_stride steps.
/// Blow-up ends the run with completed = false and keeps the partial series.
SimulationResult simulate(const ModelParams& p, const Equilibrium& eq, const FieldState& s0,
                          const SimulationOptions& opts);

/// Diagnostics CSV with the columns of Diagnostics.
void write_diagnostics_csv(std::ostream& os, const std::vector<Diagnostics>& rows);
void write_wave_csv(std::ostream& os, const std::vector<WaveComparison>& rows);

}  // namespace vasc
