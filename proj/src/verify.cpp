#include "vasc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "vasc/analysis.hpp"
#include "vasc/errors.hpp"
#include "vasc/lyapunov.hpp"
#include "vasc/snapshot.hpp"
#include "vasc/solver.hpp"
#include "vasc/spectral.hpp"

namespace vasc {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skip: return "skip";
  }
  return "unknown";
}

namespace {

double mat_norm(const Mat3c& M) { return M.cwiseAbs().maxCoeff(); }

CheckResult make(const std::string& name, bool ok, double value, const std::string& detail) {
  return {name, ok ? CheckStatus::pass : CheckStatus::fail, detail, value};
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult check_vieta(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    ModelParams p;
    p.mu = 2.0 * U(rng);
    p.alpha = 0.1 + 3.0 * U(rng);
    p.D = 0.1 + 3.0 * U(rng);
    p.a = 0.1 + 3.0 * U(rng);
    p.b = 0.1 + 3.0 * U(rng);
    p.pressure = PressureLaw::quadratic(0.5 + 5.0 * U(rng));
    const Equilibrium eq = make_equilibrium(p, 0.2 + 3.0 * U(rng));
    const double k = 10.0 * U(rng);
    const CubicCoeffs c = characteristic_coeffs(p, eq, k);
    const Roots r = solve_cubic(c).roots;
    const double e2 = std::abs(r[0] + r[1] + r[2] + c.c2) / std::abs(c.c2);
    const double e1 = std::abs(r[0] * r[1] + r[0] * r[2] + r[1] * r[2] - c.c1) / std::abs(c.c1);
    const double e0 = std::abs(r[0] * r[1] * r[2] + c.c0) / std::max(std::abs(c.c0), 1e-300);
    worst = std::max({worst, e2, e1, c.c0 == 0.0 ? 0.0 : e0});
  }
  return make("vieta", worst <= 1e-9, worst, "max relative Vieta defect over 1000 draws");
}

CheckResult check_projections(const ModelParams& p, const Equilibrium& eq) {
  double worst = 0.0;
  int used = 0;
  for (double k : {0.05, 0.3, 0.7, 1.0, 2.0, 5.0, 10.0}) {
    const SpectralDecomposition d = decompose(p, eq, k);
    if (!d.separated) continue;
    ++used;
    const Mat3c A = assemble_A(p, eq, k);
    const double scale = std::max(1.0, mat_norm(A));
    Mat3c sum = Mat3c::Zero(), recon = Mat3c::Zero();
    for (int j = 0; j < 3; ++j) {
      sum += d.projections[j];
      recon += d.lambda[j] * d.projections[j];
      worst = std::max(worst, mat_norm(d.projections[j] * d.projections[j] - d.projections[j]));
    }
    worst = std::max(worst, mat_norm(sum - Mat3c::Identity()));
    worst = std::max(worst, mat_norm(recon - A) / scale);
  }
  return make("projections", used > 0 && worst <= 1e-10, worst,
              "idempotency, resolution of identity, A = sum lambda_j P_j");
}

CheckResult check_semigroup(const ModelParams& p, const Equilibrium& eq, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double k = 5.0 * U(rng), t = 3.0 * U(rng), s = 3.0 * U(rng);
    const LongitudinalPropagator prop(p, eq, k);
    const Mat3c lhs = prop.at(t + s);
    const Mat3c rhs = prop.at(t) * prop.at(s);
    worst = std::max(worst, mat_norm(lhs - rhs) / std::max(1.0, mat_norm(lhs)));
  }
  return make("semigroup", worst <= 1e-9, worst, "exp(A(t+s)) = exp(At) exp(As)");
}

CheckResult check_putzer(const ModelParams& p, const Equilibrium& eq) {
  double worst = 0.0;
  for (double k : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    const SpectralDecomposition d = decompose(p, eq, k);
    if (!d.separated) continue;
    const Mat3c A = assemble_A(p, eq, k);
    for (double t : {0.0, 0.5, 2.0, 7.0}) {
      const Mat3c E1 = propagator(d, t);
      const Mat3c E2 = propagator_putzer(A, d.lambda, t);
      worst = std::max(worst, mat_norm(E1 - E2) / std::max(1.0, mat_norm(E1)));
    }
  }
  return make("putzer_agreement", worst <= 1e-9, worst, "Putzer vs projection propagator");
}

CheckResult check_linear_stability(const ModelParams& p, const Equilibrium& eq) {
  const bool stable = stability_check(p, eq).stable;
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 400; ++i) {
    const double k = std::pow(10.0, -3.0 + 4.0 * i / 399.0);
    for (const auto& z : solve_cubic(characteristic_coeffs(p, eq, k)).roots)
      max_re = std::max(max_re, z.real());
  }
  if (stable)
    return make("linear_stability", max_re < 0.0, max_re, "max Re lambda over k in [1e-3, 10]");
  return make("linear_instability", max_re > 0.0, max_re,
              "unstable ground state: some k has Re lambda > 0");
}

CheckResult check_asymptotics(const ModelParams& p, const Equilibrium& eq) {
  const double sigma = stability_check(p, eq).sigma;
  std::vector<double> ratios;
  for (double k : {0.2, 0.1, 0.05, 0.025}) {
    const Roots r = labelled_roots(p, eq, k);
    ratios.push_back(std::abs(r[0] + sigma * k * k) / std::pow(k, 4));
  }
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  const double spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return make("root_asymptotics", spread < 4.0, spread,
              "spread of |lambda_1 + sigma k^2| / k^4 over k = 0.2 .. 0.025");
}

CheckResult check_lyapunov(const ModelParams& p, const Equilibrium& eq, std::mt19937_64& rng) {
  if (!stability_check(p, eq).stable)
    return {"lyapunov_envelope", CheckStatus::skip, "ground state unstable: no functional", 0.0};
  const LyapunovWeights w = kappa_select(p, eq);
  std::normal_distribution<double> N(0.0, 1.0);
  double worst = 0.0;
  for (double k : {0.01, 0.1, 1.0, 10.0}) {
    const WaveVector kv{{k, 0.0, 0.0}};
    const Roots r = solve_cubic(characteristic_coeffs(p, eq, k)).roots;
    double fastest = p.alpha;
    for (const auto& z : r) fastest = std::max(fastest, std::abs(z));
    const double dt = 0.1 / fastest;
    for (int i = 0; i < 10; ++i) {
      ModeState m;
      m.rho = {N(rng), N(rng)};
      m.phi = {N(rng), N(rng)};
      for (auto& c : m.u) c = {N(rng), N(rng)};
      worst = std::max(worst, dissipation_check(w, kv, m, 20.0, dt).max_ratio);
    }
  }
  return make("lyapunov_envelope", worst <= 1.0 + 1e-8 && w.lambda > 0.0, worst,
              "kappa = " + num(w.kappa) + ", lambda = " + num(w.lambda) +
                  "; max E(t)/envelope over k in {0.01,0.1,1,10}");
}

SimulationResult small_run(const ModelParams& p, const Equilibrium& eq, double dt) {
  Grid g{1, 128, 100.0};
  InitFamily fam;
  fam.rho = {0.05, 4.0, std::nullopt};
  fam.u[0] = {0.02, 4.0, std::nullopt};
  SimulationOptions so;
  so.dt = dt;
  so.t_end = 4.0;
  so.sample_stride = 1;
  so.diagnostics_order = 0;
  so.enforce_cutoff = false;
  return simulate(p, eq, init_data(g, p, eq, fam), so);
}

// Max |dF/dt + dissipation| by centred differences, relative to the peak dissipation.
double energy_residual(const SimulationResult& res) {
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 1; i + 1 < res.series.size(); ++i) {
    const auto& a = res.series[i - 1];
    const auto& b = res.series[i];
    const auto& c = res.series[i + 1];
    const double dF = (c.F - a.F) / (c.t - a.t);
    worst = std::max(worst, std::abs(dF + b.dissipation_u + b.dissipation_phi));
    scale = std::max(scale, b.dissipation_u + b.dissipation_phi);
  }
  return scale > 0.0 ? worst / scale : worst;
}

std::vector<CheckResult> check_solver(const ModelParams& p, const Equilibrium& eq) {
  std::vector<CheckResult> out;
  try {
    const SimulationResult res = small_run(p, eq, 0.05);
    if (!res.completed) {
      out.push_back(make("mass_conservation", false, 0.0, "run failed: " + res.status));
      return out;
    }
    double drift = 0.0;
    for (const auto& d : res.series)
      drift = std::max(drift, std::abs(d.mass - res.series.front().mass) / res.series.front().mass);
    out.push_back(make("mass_conservation", drift <= 1e-12, drift, "max relative mass drift"));
    if (p.mu > 0.0 && stability_check(p, eq).stable) {
      const SimulationResult fine = small_run(p, eq, 0.025);
      const double r1 = energy_residual(res), r2 = energy_residual(fine);
      const double order = std::log2(r1 / r2);
      out.push_back(make("energy_identity", fine.completed && order >= 1.8 && r2 <= 1e-3, order,
                         "residual " + num(r1) + " -> " + num(r2) + " under dt halving"));
    } else {
      out.push_back({"energy_identity", CheckStatus::skip,
                     p.mu > 0.0 ? "ground state unstable" : "mu = 0: F undefined", 0.0});
    }
  } catch (const std::exception& e) {
    out.push_back(make("mass_conservation", false, 0.0, e.what()));
  }
  return out;
}

CheckResult check_fit_exactness() {
  double worst = 0.0;
  for (double r : {-0.75, -1.25, -1.75, -2.3, -0.1}) {
    TimeSeries ts;
    for (int i = 0; i < 30; ++i) {
      const double t = 10.0 * std::pow(100.0, i / 29.0);
      ts.times.push_back(t);
      ts.values.push_back(3.0 * std::pow(1.0 + t, r));
    }
    const DecayFit f = fit_decay(ts);
    worst = std::max(worst, std::abs(f.exponent - r));
  }
  return make("fit_exactness", worst <= 1e-10, worst, "synthetic power laws");
}

CheckResult check_config_roundtrip(const ExperimentConfig& c) {
  try {
    const std::string s1 = serialize_config(c);
    const ExperimentConfig c2 = parse_config(s1);
    const std::string s2 = serialize_config(c2);
    return make("config_roundtrip", c2 == c && s1 == s2, 0.0, "parse(serialize(c)) == c");
  } catch (const std::exception& e) {
    return make("config_roundtrip", false, 0.0, e.what());
  }
}

CheckResult check_snapshot_roundtrip(const ModelParams& p, const Equilibrium& eq,
                                     const std::string& dir) {
  try {
    Grid g{2, 16, 10.0};
    InitFamily fam;
    fam.rho = {0.1, 1.5, std::nullopt};
    fam.u[1] = {0.05, 2.0, std::nullopt};
    FieldState s = init_data(g, p, eq, fam);
    s.t = 1.25;
    const Snapshot snap = snapshot_of(s);
    const std::string path = (std::filesystem::path(dir) / "verify_roundtrip.vasw").string();
    write_snapshot(path, snap);
    const Snapshot back = read_snapshot(path);
    std::filesystem::remove(path);
    bool ok = back.grid.dim == g.dim && back.grid.n == g.n && back.grid.length == g.length &&
              back.t == s.t && back.names == snap.names && back.fields == snap.fields;
    // A truncated copy must be rejected with an offset.
    auto bytes = encode_snapshot(snap);
    bytes.resize(bytes.size() - 5);
    bool rejected = false;
    try {
      decode_snapshot(bytes);
    } catch (const SnapshotError&) {
      rejected = true;
    }
    return make("snapshot_roundtrip", ok && rejected, 0.0,
                rejected ? "write/read identity; truncation detected"
                         : "truncated snapshot was accepted");
  } catch (const std::exception& e) {
    return make("snapshot_roundtrip", false, 0.0, e.what());
  }
}

CheckResult check_snapshot_file(const std::string& path) {
  try {
    const Snapshot s = read_snapshot(path);
    return make("snapshot_file", true, 0.0,
                path + ": " + std::to_string(s.fields.size()) + " fields at t = " + num(s.t));
  } catch (const SnapshotError& e) {
    return make("snapshot_file", false, static_cast<double>(e.offset()), e.what());
  } catch (const std::exception& e) {
    return make("snapshot_file", false, 0.0, e.what());
  }
}

template <class F>
CheckResult guarded(const std::string& name, F&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return make(name, false, 0.0, std::string("exception: ") + e.what());
  }
}

}  // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  const ModelParams p = opts.config.model();
  const Equilibrium eq = opts.config.equilibrium();
  std::mt19937_64 rng(opts.seed);
  const bool stable = stability_check(p, eq).stable;

  out.push_back(guarded("vieta", [&] { return check_vieta(rng); }));
  out.push_back(guarded("projections", [&] { return check_projections(p, eq); }));
  out.push_back(guarded("semigroup", [&] { return check_semigroup(p, eq, rng); }));
  out.push_back(guarded("putzer_agreement", [&] { return check_putzer(p, eq); }));
  out.push_back(guarded("linear_stability", [&] { return check_linear_stability(p, eq); }));
  if (stable)
    out.push_back(guarded("root_asymptotics", [&] { return check_asymptotics(p, eq); }));
  else
    out.push_back({"root_asymptotics", CheckStatus::skip, "ground state unstable", 0.0});
  out.push_back(guarded("lyapunov_envelope", [&] { return check_lyapunov(p, eq, rng); }));
  try {
    for (auto& r : check_solver(p, eq)) out.push_back(std::move(r));
  } catch (const std::exception& e) {
    out.push_back(make("mass_conservation", false, 0.0, e.what()));
  }
  out.push_back(guarded("fit_exactness", [&] { return check_fit_exactness(); }));
  out.push_back(guarded("config_roundtrip", [&] { return check_config_roundtrip(opts.config); }));
  out.push_back(guarded("snapshot_roundtrip",
                        [&] { return check_snapshot_roundtrip(p, eq, opts.scratch_dir); }));
  if (opts.snapshot_path)
    out.push_back(guarded("snapshot_file", [&] { return check_snapshot_file(*opts.snapshot_path); }));
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::none_of(results.begin(), results.end(),
                      [](const CheckResult& r) { return r.status == CheckStatus::fail; });
}

void write_jsonl(std::ostream& os, const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["status"] = to_string(r.status);
    j["value"] = std::isfinite(r.value) ? nlohmann::ordered_json(r.value)
                                        : nlohmann::ordered_json(nullptr);
    j["detail"] = r.detail;
    os << j.dump() << '\n';
  }
}

}  // namespace vasc
