// vasclab: command-line driver for the vasculogenesis model experiments.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vasc/analysis.hpp"
#include "vasc/config.hpp"
#include "vasc/errors.hpp"
#include "vasc/grid.hpp"
#include "vasc/lyapunov.hpp"
#include "vasc/report.hpp"
#include "vasc/snapshot.hpp"
#include "vasc/solver.hpp"
#include "vasc/spectral.hpp"
#include "vasc/verify.hpp"

namespace fs = std::filesystem;
using namespace vasc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

// Collects emitted files so the manifest lists every one of them.
struct Run {
  ExperimentConfig cfg;
  fs::path out;
  RunManifest manifest;

  fs::path file(const std::string& name) {
    manifest.files.push_back(name);
    return out / name;
  }
  void finish() {
    manifest.end_time = utc_now_iso8601();
    manifest.files.push_back("manifest.json");
    write_manifest((out / "manifest.json").string(), manifest);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::ofstream open_csv(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open " + p.string());
  os.precision(17);
  return os;
}

Run start(const Globals& g, const std::string& command) {
  Run r;
  if (!g.config_path.empty()) r.cfg = load_config(g.config_path);
  if (!g.out_dir.empty()) r.cfg.out_dir = g.out_dir;
  if (g.seed) r.cfg.seed = *g.seed;
  r.cfg.validate();
  if (g.threads > 0) set_num_threads(g.threads);
  r.out = r.cfg.out_dir;
  ensure_directory(r.out.string());
  r.manifest.command = command;
  r.manifest.config_hash = config_hash(r.cfg);
  r.manifest.start_time = utc_now_iso8601();
  return r;
}

int cmd_spectrum(const Globals& g, double k_min, double k_max, int samples) {
  if (!(k_min >= 0.0) || !(k_min < k_max))
    throw UsageError("spectrum: need 0 <= k-min < k-max");
  if (samples < 2) throw UsageError("spectrum: need at least 2 samples");
  Run r = start(g, "spectrum");
  const ModelParams p = r.cfg.model();
  const Equilibrium eq = r.cfg.equilibrium();
  std::vector<double> ks(samples);
  for (int i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / (samples - 1);
    ks[i] = k_min > 0.0 ? k_min * std::pow(k_max / k_min, s) : k_max * s;
  }
  const auto rows = spectrum_sweep(p, eq, ks);
  {
    auto os = open_csv(r.file("spectrum.csv"));
    write_spectrum_csv(os, rows);
  }
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& row : rows)
    for (const auto& z : row.lambda) max_re = std::max(max_re, z.real());
  const DerivedCoeffs dc = stability_check(p, eq);
  r.manifest.summary["margin"] = fmt(dc.margin);
  r.manifest.summary["sigma"] = fmt(dc.sigma);
  r.manifest.summary["stable"] = dc.stable ? "true" : "false";
  r.manifest.summary["max_re_lambda"] = fmt(max_re);
  r.finish();
  std::cout << "spectrum: " << rows.size() << " rows, max Re lambda = " << max_re << '\n';
  return kExitOk;
}

int cmd_linear_decay(const Globals& g) {
  Run r = start(g, "linear-decay");
  if (r.cfg.q.empty()) throw UsageError("linear-decay: analysis.q is empty");
  const ModelParams p = r.cfg.model();
  const Equilibrium eq = r.cfg.equilibrium();
  const DerivedCoeffs dc = stability_check(p, eq);
  if (!dc.stable)
    throw ConfigError("linear-decay: ground state is linearly unstable (margin = " +
                      fmt(dc.margin) + "); decay rates do not apply");
  const auto times = log_times(r.cfg.linear_t_min, r.cfg.linear_t_max, r.cfg.linear_samples);
  const RadialProfile prof = r.cfg.radial_profile();
  const Quantity qs[] = {Quantity::rho,           Quantity::u,
                         Quantity::phi,           Quantity::rho_minus_wave,
                         Quantity::u_minus_wave,  Quantity::phi_minus_wave};
  std::vector<NamedFit> fits;
  std::vector<std::pair<std::string, TimeSeries>> curves;
  for (double q : r.cfg.q) {
    for (Quantity qt : qs) {
      TimeSeries ts = linear_decay_curve(p, eq, prof, times, qt, q);
      fits.push_back({to_string(qt), q, fit_decay(ts, r.cfg.fit_window(), true)});
      curves.emplace_back(std::string(to_string(qt)) + (std::isinf(q) ? "_qinf" : "_q" + fmt(q)),
                          std::move(ts));
    }
  }
  const RateTable table = rate_table(fits, 3);
  {
    auto os = open_csv(r.file("rate_table.csv"));
    write_rate_table_csv(os, table);
  }
  {
    auto os = open_csv(r.file("linear_curves.csv"));
    os << "t";
    for (const auto& c : curves) os << ',' << c.first;
    os << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
      os << times[i];
      for (const auto& c : curves) os << ',' << c.second.values[i];
      os << '\n';
    }
  }
  double worst_gap = 0.0;
  for (const auto& row : table.rows) worst_gap = std::max(worst_gap, std::abs(row.gap));
  r.manifest.summary["max_abs_gap"] = fmt(worst_gap);
  r.finish();
  for (const auto& row : table.rows)
    std::cout << row.quantity << " q=" << (std::isinf(row.q) ? std::string("inf") : fmt(row.q))
              << " theory " << row.theory << " fitted " << row.fitted << '\n';
  return kExitOk;
}

int cmd_lyapunov(const Globals& g, int modes, double horizon) {
  if (modes < 1) throw UsageError("lyapunov: need at least one mode");
  if (!(horizon > 0.0)) throw UsageError("lyapunov: horizon must be positive");
  Run r = start(g, "lyapunov");
  const ModelParams p = r.cfg.model();
  const Equilibrium eq = r.cfg.equilibrium();
  const LyapunovWeights w = kappa_select(p, eq);
  std::mt19937_64 rng(r.cfg.seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<DissipationSample> trace;
  double worst = 0.0;
  auto sum = open_csv(r.file("lyapunov_summary.csv"));
  sum << "kmag,mode,max_ratio,worst_t,passed\n";
  for (double k : {0.01, 0.1, 1.0, 10.0}) {
    double fastest = p.alpha;
    for (const auto& z : solve_cubic(characteristic_coeffs(p, eq, k)).roots)
      fastest = std::max(fastest, std::abs(z));
    const double dt = std::min(0.1 / fastest, horizon / 200.0);
    for (int i = 0; i < modes; ++i) {
      ModeState m;
      m.rho = {N(rng), N(rng)};
      m.phi = {N(rng), N(rng)};
      for (auto& c : m.u) c = {N(rng), N(rng)};
      const DissipationReport rep =
          dissipation_check(w, WaveVector{{k, 0.0, 0.0}}, m, horizon, dt, i == 0 ? &trace : nullptr);
      worst = std::max(worst, rep.max_ratio);
      sum << k << ',' << i << ',' << rep.max_ratio << ',' << rep.worst_t << ','
          << (rep.passed ? 1 : 0) << '\n';
    }
  }
  sum.close();
  {
    auto os = open_csv(r.file("lyapunov.csv"));
    write_dissipation_csv(os, trace);
  }
  const bool ok = worst <= 1.0 + 1e-8;
  r.manifest.summary["kappa"] = fmt(w.kappa);
  r.manifest.summary["lambda"] = fmt(w.lambda);
  r.manifest.summary["c_low"] = fmt(w.c_low);
  r.manifest.summary["c_high"] = fmt(w.c_high);
  r.manifest.summary["max_ratio"] = fmt(worst);
  r.manifest.passed = ok;
  r.finish();
  std::cout << "lyapunov: kappa = " << w.kappa << ", lambda = " << w.lambda
            << ", max ratio = " << worst << (ok ? " (pass)" : " (FAIL)") << '\n';
  return ok ? kExitOk : kExitVerify;
}

TimeSeries series_of(const std::vector<double>& t, const std::vector<double>& v) {
  return TimeSeries{t, v};
}

int cmd_simulate(const Globals& g, bool compare_wave) {
  Run r = start(g, "simulate");
  const ModelParams p = r.cfg.model();
  const Equilibrium eq = r.cfg.equilibrium();
  const Grid grid = r.cfg.grid();
  const FieldState s0 = init_data(grid, p, eq, r.cfg.init_family());

  SimulationOptions so;
  so.t_end = r.cfg.t_end;
  so.dt = r.cfg.dt;
  so.sample_stride = r.cfg.sample_stride;
  so.solver.scheme = scheme_from_string(r.cfg.scheme);
  so.diagnostics_order = r.cfg.diagnostics_order;
  so.compare_wave = compare_wave;
  so.snapshot_stride = r.cfg.snapshot_stride;
  int snap_index = 0;
  so.on_snapshot = [&](const FieldState& s) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04d.vasw", snap_index++);
    write_snapshot(r.file(name).string(), snapshot_of(s));
  };
  if (stability_check(p, eq).stable && p.mu > 0.0) so.kappa = kappa_select(p, eq).kappa;

  const SimulationResult res = simulate(p, eq, s0, so);
  {
    auto os = open_csv(r.file("diagnostics.csv"));
    write_diagnostics_csv(os, res.series);
  }
  if (compare_wave) {
    auto os = open_csv(r.file("compare_wave.csv"));
    write_wave_csv(os, res.wave);
  }

  std::vector<double> t;
  for (const auto& d : res.series) t.push_back(d.t);
  auto column = [&](auto get) {
    std::vector<double> v;
    for (const auto& d : res.series) v.push_back(get(d));
    return v;
  };
  auto wcolumn = [&](auto get) {
    std::vector<double> v;
    for (const auto& d : res.wave) v.push_back(get(d));
    return v;
  };
  struct Candidate {
    std::string quantity;
    double q;
    TimeSeries ts;
  };
  std::vector<Candidate> cands{
      {"rho", 2.0, series_of(t, column([](const Diagnostics& d) { return d.l2_rho; }))},
      {"u", 2.0, series_of(t, column([](const Diagnostics& d) { return d.l2_u; }))},
      {"phi", 2.0, series_of(t, column([](const Diagnostics& d) { return d.l2_phi; }))},
      {"rho", kInf, series_of(t, column([](const Diagnostics& d) { return d.linf_rho; }))},
      {"u", kInf, series_of(t, column([](const Diagnostics& d) { return d.linf_u; }))},
  };
  if (compare_wave && res.wave.size() == t.size()) {
    cands.push_back({"rho_minus_wave", 2.0,
                     series_of(t, wcolumn([](const WaveComparison& w) { return w.l2_rho_minus_wave; }))});
    cands.push_back({"u_minus_wave", 2.0,
                     series_of(t, wcolumn([](const WaveComparison& w) { return w.l2_u_minus_wave; }))});
    cands.push_back({"phi_minus_wave", 2.0,
                     series_of(t, wcolumn([](const WaveComparison& w) { return w.l2_phi_minus_wave; }))});
    cands.push_back({"rho_minus_wave", kInf,
                     series_of(t, wcolumn([](const WaveComparison& w) { return w.linf_rho_minus_wave; }))});
  }
  std::vector<NamedFit> fits;
  int skipped = 0;
  for (const auto& c : cands) {
    try {
      fits.push_back({c.quantity, c.q, fit_decay(c.ts, r.cfg.fit_window(), true)});
    } catch (const std::exception&) {
      ++skipped;
    }
  }
  {
    auto os = open_csv(r.file("rate_table.csv"));
    write_rate_table_csv(os, rate_table(fits, grid.dim));
  }
  write_snapshot(r.file("final.vasw").string(), snapshot_of(res.final_state));

  r.manifest.summary["status"] = res.status;
  r.manifest.summary["cutoff"] = fmt(res.cutoff);
  r.manifest.summary["t_final"] = fmt(res.t_final);
  r.manifest.summary["samples"] = std::to_string(res.series.size());
  r.manifest.summary["fits"] = std::to_string(fits.size());
  r.manifest.summary["fits_skipped"] = std::to_string(skipped);
  if (res.blowup_time) r.manifest.summary["blowup_time"] = fmt(*res.blowup_time);
  r.manifest.passed = res.completed;
  r.finish();
  std::cout << "simulate: " << res.status << ", t = " << res.t_final << " (cutoff " << res.cutoff
            << "), " << fits.size() << " fits, " << skipped << " skipped\n";
  if (!res.completed) {
    std::cerr << "simulate: run ended early: " << res.status << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_verify(const Globals& g, const std::string& snapshot) {
  Run r = start(g, "verify");
  VerifyOptions vo;
  vo.config = r.cfg;
  vo.seed = r.cfg.seed;
  vo.scratch_dir = r.out.string();
  if (!snapshot.empty()) vo.snapshot_path = snapshot;
  const auto results = run_verify(vo);
  {
    std::ofstream os(r.file("verify.jsonl"));
    write_jsonl(os, results);
  }
  write_jsonl(std::cout, results);
  const bool ok = all_passed(results);
  int failed = 0;
  for (const auto& c : results) failed += c.status == CheckStatus::fail;
  r.manifest.summary["checks"] = std::to_string(results.size());
  r.manifest.summary["failed"] = std::to_string(failed);
  r.manifest.passed = ok;
  r.finish();
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vasclab: hyperbolic-parabolic vasculogenesis model experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Experiment config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output directory (overrides output.out_dir)");
  app.add_option("--threads", g.threads, "Worker threads (0: library default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "RNG seed (overrides init.seed)");
  app.set_version_flag("--version", VASC_VERSION);

  double k_min = 1e-3, k_max = 10.0;
  int samples = 200;
  auto* spectrum = app.add_subcommand("spectrum", "Root sweep over |k| with asymptotic predictions");
  spectrum->add_option("--k-min", k_min, "Smallest |k|");
  spectrum->add_option("--k-max", k_max, "Largest |k|");
  spectrum->add_option("--samples", samples, "Number of |k| samples");

  auto* linear = app.add_subcommand("linear-decay", "Linear decay curves and fitted exponents");

  int modes = 50;
  double horizon = 20.0;
  auto* lyap = app.add_subcommand("lyapunov", "Select kappa and check the mode-wise envelope");
  lyap->add_option("--modes", modes, "Random modes per |k|");
  lyap->add_option("--horizon", horizon, "Time horizon");

  bool compare_wave = false;
  auto* sim = app.add_subcommand("simulate", "Nonlinear pseudo-spectral run");
  sim->add_flag("--compare-wave", compare_wave, "Also compare against the diffusion wave");

  std::string snapshot;
  auto* verify = app.add_subcommand("verify", "Run the invariant battery");
  verify->add_option("--snapshot", snapshot, "Also validate this snapshot file");

  for (auto* sc : {spectrum, linear, lyap, sim, verify}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(g, k_min, k_max, samples);
    if (*linear) return cmd_linear_decay(g);
    if (*lyap) return cmd_lyapunov(g, modes, horizon);
    if (*sim) return cmd_simulate(g, compare_wave);
    if (*verify) return cmd_verify(g, snapshot);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StabilityError& e) {
    std::cerr << "unstable ground state: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const FitError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
