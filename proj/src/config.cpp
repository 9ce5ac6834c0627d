#include "vasc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "vasc/errors.hpp"

namespace vasc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& s) {
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError("config: " + key + ": expected a number, got '" + s + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& s) {
  Int v = 0;
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError("config: " + key + ": expected an integer, got '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt(v[i]);
  }
  return s;
}

struct Binding {
  std::string section, name;
  std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

template <class M>
Binding real(const char* sec, const char* name, M ExperimentConfig::*m) {
  return {sec, name,
          [m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*m = parse_double(k, v);
          },
          [m](const ExperimentConfig& c) -> std::optional<std::string> { return fmt(c.*m); }};
}

template <class M>
Binding integer(const char* sec, const char* name, M ExperimentConfig::*m) {
  return {sec, name,
          [m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*m = parse_int<M>(k, v);
          },
          [m](const ExperimentConfig& c) -> std::optional<std::string> {
            return std::to_string(c.*m);
          }};
}

Binding text(const char* sec, const char* name, std::string ExperimentConfig::*m) {
  return {sec, name,
          [m](ExperimentConfig& c, const std::string&, const std::string& v) { c.*m = v; },
          [m](const ExperimentConfig& c) -> std::optional<std::string> { return c.*m; }};
}

using BumpRef = std::function<BumpConfig&(ExperimentConfig&)>;
using BumpCRef = std::function<const BumpConfig&(const ExperimentConfig&)>;

void bump_bindings(std::vector<Binding>& out, const std::string& field, BumpRef ref,
                   BumpCRef cref) {
  out.push_back({"init", field + ".amplitude",
                 [ref](ExperimentConfig& c, const std::string& k, const std::string& v) {
                   ref(c).amplitude = parse_double(k, v);
                 },
                 [cref](const ExperimentConfig& c) -> std::optional<std::string> {
                   return fmt(cref(c).amplitude);
                 }});
  out.push_back({"init", field + ".width",
                 [ref](ExperimentConfig& c, const std::string& k, const std::string& v) {
                   ref(c).width = parse_double(k, v);
                 },
                 [cref](const ExperimentConfig& c) -> std::optional<std::string> {
                   return fmt(cref(c).width);
                 }});
  out.push_back({"init", field + ".center",
                 [ref](ExperimentConfig& c, const std::string& k, const std::string& v) {
                   const auto xs = parse_list(k, v);
                   if (xs.empty() || xs.size() > 3)
                     throw ConfigError("config: " + k + ": expected 1 to 3 coordinates");
                   std::array<double, 3> ctr{0.0, 0.0, 0.0};
                   for (std::size_t i = 0; i < xs.size(); ++i) ctr[i] = xs[i];
                   ref(c).center = ctr;
                 },
                 [cref](const ExperimentConfig& c) -> std::optional<std::string> {
                   const auto& ctr = cref(c).center;
                   if (!ctr) return std::nullopt;
                   return fmt((*ctr)[0]) + "," + fmt((*ctr)[1]) + "," + fmt((*ctr)[2]);
                 }});
}

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = [] {
    using EC = ExperimentConfig;
    std::vector<Binding> b;
    b.push_back(real("model", "mu", &EC::mu));
    b.push_back(real("model", "alpha", &EC::alpha));
    b.push_back(real("model", "D", &EC::D));
    b.push_back(real("model", "a", &EC::a));
    b.push_back(real("model", "b", &EC::b));
    b.push_back(real("model", "rho_bar", &EC::rho_bar));
    b.push_back(text("model", "pressure.kind", &EC::pressure_kind));
    b.push_back(real("model", "pressure.K", &EC::pressure_K));
    b.push_back(real("model", "pressure.gamma", &EC::pressure_gamma));
    b.push_back(integer("grid", "dim", &EC::dim));
    b.push_back(integer("grid", "n", &EC::n));
    b.push_back(real("grid", "length", &EC::length));
    b.push_back(real("time", "dt", &EC::dt));
    b.push_back(real("time", "t_end", &EC::t_end));
    b.push_back(text("time", "scheme", &EC::scheme));
    b.push_back(integer("time", "sample_stride", &EC::sample_stride));
    bump_bindings(b, "rho", [](EC& c) -> BumpConfig& { return c.rho; },
                  [](const EC& c) -> const BumpConfig& { return c.rho; });
    const char* comps[3] = {"u_x", "u_y", "u_z"};
    for (int j = 0; j < 3; ++j)
      bump_bindings(b, comps[j], [j](EC& c) -> BumpConfig& { return c.u[j]; },
                    [j](const EC& c) -> const BumpConfig& { return c.u[j]; });
    bump_bindings(b, "phi", [](EC& c) -> BumpConfig& { return c.phi; },
                  [](const EC& c) -> const BumpConfig& { return c.phi; });
    b.push_back(real("init", "noise.amplitude", &EC::noise_amplitude));
    b.push_back(real("init", "noise.width", &EC::noise_width));
    b.push_back(integer("init", "seed", &EC::seed));
    b.push_back(real("analysis", "fit.lo", &EC::fit_lo));
    b.push_back(real("analysis", "fit.hi", &EC::fit_hi));
    b.push_back({"analysis", "q",
                 [](EC& c, const std::string& k, const std::string& v) { c.q = parse_list(k, v); },
                 [](const EC& c) -> std::optional<std::string> { return fmt_list(c.q); }});
    b.push_back(real("analysis", "r0", &EC::r0));
    b.push_back(integer("analysis", "diagnostics_order", &EC::diagnostics_order));
    b.push_back(real("linear", "rho_amplitude", &EC::linear_rho_amplitude));
    b.push_back(real("linear", "u_amplitude", &EC::linear_u_amplitude));
    b.push_back(real("linear", "width", &EC::linear_width));
    b.push_back(real("linear", "t_min", &EC::linear_t_min));
    b.push_back(real("linear", "t_max", &EC::linear_t_max));
    b.push_back(integer("linear", "samples", &EC::linear_samples));
    b.push_back(text("output", "out_dir", &EC::out_dir));
    b.push_back(integer("output", "snapshot_stride", &EC::snapshot_stride));
    return b;
  }();
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text_in) {
  ExperimentConfig c;
  std::stringstream ss(text_in);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = " (line " + std::to_string(lineno) + ")";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: malformed section header" + where);
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& b : bindings()) known = known || b.section == section;
      if (!known) throw ConfigError("config: unknown section [" + section + "]" + where);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key = value" + where);
    if (section.empty()) throw ConfigError("config: key outside any section" + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string path = section + "." + key;
    bool found = false;
    for (const auto& b : bindings()) {
      if (b.section == section && b.name == key) {
        b.set(c, path, value);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("config: unknown key " + path + where);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out, section;
  for (const auto& b : bindings()) {
    const auto v = b.get(c);
    if (!v) continue;
    if (b.section != section) {
      if (!section.empty()) out += "\n";
      section = b.section;
      out += "[" + section + "]\n";
    }
    out += b.name + " = " + *v + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string s = serialize_config(c);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModelParams ExperimentConfig::model() const {
  ModelParams p;
  p.mu = mu;
  p.alpha = alpha;
  p.D = D;
  p.a = a;
  p.b = b;
  p.pressure.kind = pressure_kind == "power" ? PressureKind::power : PressureKind::quadratic;
  p.pressure.K = pressure_K;
  p.pressure.gamma = pressure_kind == "power" ? pressure_gamma : 2.0;
  return p;
}

Equilibrium ExperimentConfig::equilibrium() const { return make_equilibrium(model(), rho_bar); }

Grid ExperimentConfig::grid() const { return Grid{dim, n, length}; }

InitFamily ExperimentConfig::init_family() const {
  auto conv = [](const BumpConfig& b) { return GaussianBump{b.amplitude, b.width, b.center}; };
  InitFamily f;
  f.rho = conv(rho);
  for (int j = 0; j < 3; ++j) f.u[j] = conv(u[j]);
  f.phi = conv(phi);
  f.noise_amplitude = noise_amplitude;
  f.noise_width = noise_width;
  f.seed = seed;
  return f;
}

FitWindow ExperimentConfig::fit_window() const { return {fit_lo, fit_hi}; }

RadialProfile ExperimentConfig::radial_profile() const {
  return {linear_rho_amplitude, linear_u_amplitude, linear_width};
}

void ExperimentConfig::validate() const {
  auto wrap = [](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("config: ") + key + ": " + e.what());
    }
  };
  auto require = [](bool ok, const char* key, const char* msg) {
    if (!ok) throw ConfigError(std::string("config: ") + key + ": " + msg);
  };
  require(pressure_kind == "quadratic" || pressure_kind == "power", "model.pressure.kind",
          "expected quadratic or power");
  require(std::isfinite(mu) && mu >= 0.0, "model.mu", "must be >= 0");
  require(alpha > 0.0, "model.alpha", "must be positive");
  require(D > 0.0, "model.D", "must be positive");
  require(a > 0.0, "model.a", "must be positive");
  require(b > 0.0, "model.b", "must be positive");
  require(rho_bar > 0.0, "model.rho_bar", "must be positive");
  require(pressure_K > 0.0, "model.pressure.K", "must be positive");
  require(pressure_gamma >= 1.0, "model.pressure.gamma", "must be >= 1");
  require(dim >= 1 && dim <= 3, "grid.dim", "must be 1, 2 or 3");
  require(n >= 16 && (n & (n - 1)) == 0, "grid.n", "must be a power of two >= 16");
  require(length > 0.0, "grid.length", "must be positive");
  require(dt > 0.0, "time.dt", "must be positive");
  require(t_end >= 0.0, "time.t_end", "must be >= 0");
  wrap("time.scheme", [&] { scheme_from_string(scheme); });
  require(sample_stride >= 1, "time.sample_stride", "must be >= 1");
  require(rho.width > 0.0, "init.rho.width", "must be positive");
  require(u[0].width > 0.0, "init.u_x.width", "must be positive");
  require(u[1].width > 0.0, "init.u_y.width", "must be positive");
  require(u[2].width > 0.0, "init.u_z.width", "must be positive");
  require(phi.width > 0.0, "init.phi.width", "must be positive");
  require(noise_width > 0.0, "init.noise.width", "must be positive");
  require(fit_hi > fit_lo, "analysis.fit.hi", "must exceed analysis.fit.lo");
  require(!q.empty(), "analysis.q", "list must not be empty");
  for (double x : q) require(x >= 2.0, "analysis.q", "entries must be >= 2 or inf");
  require(r0 > 0.0, "analysis.r0", "must be positive");
  require(diagnostics_order >= 0 && diagnostics_order <= 4, "analysis.diagnostics_order",
          "must be in [0, 4]");
  require(linear_t_min > 0.0 && linear_t_max > linear_t_min, "linear.t_max",
          "need 0 < t_min < t_max");
  require(linear_samples >= 8, "linear.samples", "must be >= 8");
  require(!out_dir.empty(), "output.out_dir", "must not be empty");
  require(snapshot_stride >= 0, "output.snapshot_stride", "must be >= 0");
}

}  // namespace vasc
