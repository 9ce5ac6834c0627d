#include "vasc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vasc/errors.hpp"
#include "vasc/spectral.hpp"

namespace vasc {

void TimeSeries::validate() const {
  if (times.size() != values.size()) throw DomainError("time series: length mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
      throw DomainError("time series: non-finite entry");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw DomainError("time series: times must increase strictly");
  }
}

double lq_norm(Fft& fft, const RealField& f, double q) {
  const Grid& g = fft.grid();
  if (f.size() != g.real_size()) throw DomainError("lq_norm: field size mismatch");
  if (q == kInf) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
  }
  if (!(q >= 2.0)) throw DomainError("lq_norm: q must be >= 2");
  if (q == 2.0) return std::sqrt(parseval_l2_squared(g, fft.forward(f)));
  double s = 0.0;
  for (double x : f) s += std::pow(std::abs(x), q);
  return std::pow(s * g.cell_volume(), 1.0 / q);
}

double lq_norm(const Grid& g, const RealField& f, double q) {
  Fft fft(g);
  return lq_norm(fft, f, q);
}

double sobolev_norm(Fft& fft, const RealField& f, int N) {
  if (N < 0) throw DomainError("sobolev_norm: N must be >= 0");
  const Grid& g = fft.grid();
  const SpecField spec = fft.forward(f);
  double s = 0.0;
  for (std::size_t q = 0; q < spec.size(); ++q) {
    double k[3];
    g.wavevector(q, k);
    // sum_{|l|<=N} prod_j k_j^{2 l_j}, by recursion over the dimensions
    double w = 0.0;
    for (int a = 0; a <= N; ++a)
      for (int b = 0; b <= (g.dim >= 2 ? N - a : 0); ++b)
        for (int c = 0; c <= (g.dim >= 3 ? N - a - b : 0); ++c)
          w += std::pow(k[0] * k[0], a) * std::pow(k[1] * k[1], b) * std::pow(k[2] * k[2], c);
    s += g.hermitian_weight(q) * w * std::norm(spec[q]);
  }
  return std::sqrt(g.volume() * s);
}

double sobolev_norm(const Grid& g, const RealField& f, int N) {
  Fft fft(g);
  return sobolev_norm(fft, f, N);
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::rho: return "rho";
    case Quantity::u: return "u";
    case Quantity::phi: return "phi";
    case Quantity::rho_minus_wave: return "rho_minus_wave";
    case Quantity::u_minus_wave: return "u_minus_wave";
    case Quantity::phi_minus_wave: return "phi_minus_wave";
    case Quantity::rho_wave: return "rho_wave";
    case Quantity::u_wave: return "u_wave";
  }
  return "unknown";
}

Quantity quantity_from_string(const std::string& s) {
  for (Quantity q : {Quantity::rho, Quantity::u, Quantity::phi, Quantity::rho_minus_wave,
                     Quantity::u_minus_wave, Quantity::phi_minus_wave, Quantity::rho_wave,
                     Quantity::u_wave})
    if (s == to_string(q)) return q;
  throw DomainError("unknown quantity '" + s + "'");
}

namespace {

double component(Quantity q, const ModeState& m, const ModeState& w) {
  auto vnorm = [](const std::array<Complex, 3>& u) {
    return std::sqrt(std::norm(u[0]) + std::norm(u[1]) + std::norm(u[2]));
  };
  switch (q) {
    case Quantity::rho: return std::abs(m.rho);
    case Quantity::u: return vnorm(m.u);
    case Quantity::phi: return std::abs(m.phi);
    case Quantity::rho_minus_wave: return std::abs(m.rho - w.rho);
    case Quantity::u_minus_wave: return vnorm((m - w).u);
    case Quantity::phi_minus_wave: return std::abs(m.phi - w.phi);
    case Quantity::rho_wave: return std::abs(w.rho);
    case Quantity::u_wave: return vnorm(w.u);
  }
  return 0.0;
}

}  // namespace

TimeSeries linear_decay_curve(const ModelParams& p, const Equilibrium& eq,
                              const RadialProfile& profile, std::span<const double> times,
                              Quantity quantity, double q) {
  const DerivedCoeffs dc = stability_check(p, eq);
  if (!dc.stable) throw StabilityError("linear_decay_curve: ground state is linearly unstable");
  if (q != 2.0 && q != kInf) throw DomainError("linear_decay_curve: q must be 2 or inf");
  const double s = profile.width > 0.0 ? profile.width : dc.sigma;
  const double k_max = std::sqrt(40.0 / s);
  const bool squared = q == 2.0;
  const bool heat_only = quantity == Quantity::rho_wave || quantity == Quantity::u_wave;
  const auto& gl = boost::math::quadrature::gauss<double, 24>::abscissa();
  const auto& glw = boost::math::quadrature::gauss<double, 24>::weights();

  TimeSeries out;
  out.times.assign(times.begin(), times.end());
  out.values.resize(times.size());

  std::vector<int> failed(times.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t it = 0; it < times.size(); ++it) {
    const double t = times[it];
    // Angular integral over cos(theta) in [-1, 1] (azimuth gives 2 pi).
    auto radial = [&](double k) {
      if (k == 0.0) return 0.0;
      const LongitudinalPropagator prop(p, eq, k);
      const double g0 = std::exp(-s * k * k);
      double acc = 0.0;
      auto node = [&](double mu, double wgt) {
        const double sn = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        const WaveVector kv{{k * mu, k * sn, 0.0}};
        ModeState m0;
        m0.rho = profile.rho_amplitude * g0;
        m0.u = {Complex(profile.u_amplitude * g0), 0.0, 0.0};
        m0.phi = (p.a / p.b) * m0.rho;
        const ModeState m = heat_only ? m0 : mode_evolve_linear(prop, p.alpha, kv, m0, t);
        const ModeState w = wave_profile_mode(p, eq, kv, m0.rho, t);
        const double c = component(quantity, m, w);
        acc += wgt * (squared ? c * c : c);
      };
      for (std::size_t i = 0; i < gl.size(); ++i) {
        if (gl[i] == 0.0) {
          node(0.0, glw[i]);
        } else {
          node(gl[i], glw[i]);
          node(-gl[i], glw[i]);
        }
      }
      return k * k * acc;
    };

    const double kt = 1.0 / std::sqrt(dc.sigma * (1.0 + t));
    std::vector<double> breaks{0.0};
    for (double b = kt / 16.0; b < k_max; b *= 2.0) breaks.push_back(b);
    breaks.push_back(k_max);
    // Per-segment GK21 with bisection against an absolute target scaled by the
    // whole integral; a relative per-segment tolerance cannot be met in the
    // far tail, where the integrand is at round-off level.
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    struct Piece {
      double a, b, value, err;
    };
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      double err = 0.0;
      const double v = GK::integrate(radial, breaks[i], breaks[i + 1], 0, 0.0, &err);
      pieces.push_back({breaks[i], breaks[i + 1], v, err});
    }
    double total = 0.0, err_total = 0.0;
    for (int pass = 0; pass < 400; ++pass) {
      total = err_total = 0.0;
      for (const auto& pc : pieces) {
        total += pc.value;
        err_total += pc.err;
      }
      if (err_total <= 1e-11 * std::abs(total)) break;
      const auto worst = std::max_element(pieces.begin(), pieces.end(),
                                          [](const Piece& x, const Piece& y) { return x.err < y.err; });
      const double mid = 0.5 * (worst->a + worst->b);
      Piece left{worst->a, mid, 0.0, 0.0}, right{mid, worst->b, 0.0, 0.0};
      left.value = GK::integrate(radial, left.a, left.b, 0, 0.0, &left.err);
      right.value = GK::integrate(radial, right.a, right.b, 0, 0.0, &right.err);
      *worst = left;
      pieces.push_back(right);
    }
    if (!std::isfinite(total) || err_total > 1e-7 * std::abs(total) + 1e-300) failed[it] = 1;
    const double integral = 2.0 * std::numbers::pi * total / std::pow(2.0 * std::numbers::pi, 3);
    out.values[it] = squared ? std::sqrt(integral) : integral;
  }
  for (std::size_t it = 0; it < times.size(); ++it)
    if (failed[it])
      throw NumericError("linear_decay_curve: radial quadrature did not converge at t = " +
                         std::to_string(times[it]));
  return out;
}

DecayFit fit_decay(const TimeSeries& ts, const FitWindow& window, bool allow_low_r2) {
  ts.validate();
  std::vector<double> x, y, tt;
  for (std::size_t i = 0; i < ts.times.size(); ++i) {
    const double t = ts.times[i];
    if (t < window.lo || t > window.hi) continue;
    if (!(ts.values[i] > 0.0)) throw FitError("fit_decay: non-positive value in window");
    x.push_back(std::log1p(t));
    y.push_back(std::log(ts.values[i]));
    tt.push_back(t);
  }
  if (x.size() < 8) throw FitError("fit_decay: fewer than 8 samples in window");

  auto ols = [](const std::vector<double>& xs, const std::vector<double>& ys, double& slope,
                double& icpt) {
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    slope = sxy / sxx;
    icpt = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (icpt + slope * xs[i]);
      ss_res += r * r;
    }
    return syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  };

  DecayFit fit;
  fit.r2 = ols(x, y, fit.exponent, fit.intercept);
  fit.t_lo = tt.front();
  fit.t_hi = tt.back();
  fit.samples = x.size();
  double s_lin = 0.0, i_lin = 0.0;
  const double r2_lin = ols(tt, y, s_lin, i_lin);
  fit.steep = std::abs(fit.exponent) > 5.0;
  fit.exponential_like = r2_lin > fit.r2 && r2_lin > 0.99;
  if (fit.r2 < 0.9 && !allow_low_r2)
    throw FitError("fit_decay: R^2 = " + std::to_string(fit.r2) + " below 0.9");
  return fit;
}

double theory_exponent(const std::string& quantity, double q, int dim) {
  const double d = dim;
  const double inv_q = q == kInf ? 0.0 : 1.0 / q;
  const double base = -(d / 2.0) * (1.0 - inv_q);
  if (quantity == "rho" || quantity == "phi") return base;
  if (quantity == "u") return base - 0.5;
  if (quantity == "rho_minus_wave" || quantity == "phi_minus_wave") return base - 0.5;
  if (quantity == "u_minus_wave") return base - 1.0;
  if (quantity == "state_HN") return -d / 4.0;
  if (quantity == "grad_state") return -d / 4.0 - 0.5;
  if (quantity == "grad_u" || quantity == "grad2_rho") return -d / 4.0 - 1.0;
  throw DomainError("theory_exponent: unknown quantity '" + quantity + "'");
}

RateTable rate_table(std::span<const NamedFit> fits, int dim) {
  RateTable table;
  for (const auto& f : fits) {
    RateRow row;
    row.quantity = f.quantity;
    row.q = f.q;
    row.theory = theory_exponent(f.quantity, f.q, dim);
    row.fitted = f.fit.exponent;
    row.gap = std::abs(row.fitted - row.theory);
    row.r2 = f.fit.r2;
    row.window_lo = f.fit.t_lo;
    row.window_hi = f.fit.t_hi;
    table.rows.push_back(row);
  }
  return table;
}

void write_rate_table_csv(std::ostream& os, const RateTable& table) {
  os << "quantity,q,theory_exponent,fitted_exponent,gap,r2,window_lo,window_hi\n";
  const auto old = os.precision(17);
  for (const auto& r : table.rows) {
    os << r.quantity << ',';
    if (r.q == kInf)
      os << "inf";
    else
      os << r.q;
    os << ',' << r.theory << ',' << r.fitted << ',' << r.gap << ',' << r.r2 << ','
       << r.window_lo << ',' << r.window_hi << '\n';
  }
  os.precision(old);
}

void write_series_csv(std::ostream& os, const TimeSeries& ts, const std::string& name) {
  os << "t," << name << '\n';
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < ts.times.size(); ++i) os << ts.times[i] << ',' << ts.values[i] << '\n';
  os.precision(old);
}

std::vector<double> log_times(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("log_times: need 0 < lo < hi, n >= 2");
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return t;
}

}  // namespace vasc
