// Python bindings: a thin layer over the config-driven entry points.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vasc/analysis.hpp"
#include "vasc/config.hpp"
#include "vasc/errors.hpp"
#include "vasc/lyapunov.hpp"
#include "vasc/solver.hpp"
#include "vasc/spectral.hpp"
#include "vasc/verify.hpp"

namespace py = pybind11;
using namespace vasc;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict simulate_py(const ExperimentConfig& c, bool compare_wave) {
  c.validate();
  const ModelParams p = c.model();
  const Equilibrium eq = c.equilibrium();
  SimulationOptions so;
  so.t_end = c.t_end;
  so.dt = c.dt;
  so.sample_stride = c.sample_stride;
  so.solver.scheme = scheme_from_string(c.scheme);
  so.diagnostics_order = c.diagnostics_order;
  so.compare_wave = compare_wave;
  SimulationResult res;
  {
    py::gil_scoped_release release;
    res = simulate(p, eq, init_data(c.grid(), p, eq, c.init_family()), so);
  }
  auto col = [&](double Diagnostics::*m) {
    std::vector<double> v;
    for (const auto& d : res.series) v.push_back(d.*m);
    return to_array(v);
  };
  py::dict out;
  out["t"] = col(&Diagnostics::t);
  out["mass"] = col(&Diagnostics::mass);
  out["F"] = col(&Diagnostics::F);
  out["l2_rho"] = col(&Diagnostics::l2_rho);
  out["l2_u"] = col(&Diagnostics::l2_u);
  out["l2_phi"] = col(&Diagnostics::l2_phi);
  out["linf_rho"] = col(&Diagnostics::linf_rho);
  out["linf_u"] = col(&Diagnostics::linf_u);
  out["E_N"] = col(&Diagnostics::E_N);
  if (compare_wave) {
    auto wcol = [&](double WaveComparison::*m) {
      std::vector<double> v;
      for (const auto& w : res.wave) v.push_back(w.*m);
      return to_array(v);
    };
    out["l2_rho_minus_wave"] = wcol(&WaveComparison::l2_rho_minus_wave);
    out["l2_u_minus_wave"] = wcol(&WaveComparison::l2_u_minus_wave);
  }
  out["completed"] = res.completed;
  out["status"] = res.status;
  out["cutoff"] = res.cutoff;
  return out;
}

}  // namespace

PYBIND11_MODULE(_vasclab, m) {
  m.doc() = "Hyperbolic-parabolic vasculogenesis model: spectra, decay rates, nonlinear runs";
  m.attr("__version__") = VASC_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<StabilityError>(m, "StabilityError", PyExc_ArithmeticError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<FitError>(m, "FitError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def_readwrite("mu", &ExperimentConfig::mu)
      .def_readwrite("alpha", &ExperimentConfig::alpha)
      .def_readwrite("D", &ExperimentConfig::D)
      .def_readwrite("a", &ExperimentConfig::a)
      .def_readwrite("b", &ExperimentConfig::b)
      .def_readwrite("rho_bar", &ExperimentConfig::rho_bar)
      .def_readwrite("pressure_kind", &ExperimentConfig::pressure_kind)
      .def_readwrite("pressure_K", &ExperimentConfig::pressure_K)
      .def_readwrite("pressure_gamma", &ExperimentConfig::pressure_gamma)
      .def_readwrite("dim", &ExperimentConfig::dim)
      .def_readwrite("n", &ExperimentConfig::n)
      .def_readwrite("length", &ExperimentConfig::length)
      .def_readwrite("dt", &ExperimentConfig::dt)
      .def_readwrite("t_end", &ExperimentConfig::t_end)
      .def_readwrite("scheme", &ExperimentConfig::scheme)
      .def_readwrite("sample_stride", &ExperimentConfig::sample_stride)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_property(
          "rho_amplitude", [](const ExperimentConfig& c) { return c.rho.amplitude; },
          [](ExperimentConfig& c, double v) { c.rho.amplitude = v; })
      .def_property(
          "rho_width", [](const ExperimentConfig& c) { return c.rho.width; },
          [](ExperimentConfig& c, double v) { c.rho.width = v; })
      .def_readwrite("fit_lo", &ExperimentConfig::fit_lo)
      .def_readwrite("fit_hi", &ExperimentConfig::fit_hi)
      .def_readwrite("q", &ExperimentConfig::q)
      .def("validate", &ExperimentConfig::validate)
      .def("serialize", [](const ExperimentConfig& c) { return serialize_config(c); })
      .def("hash", [](const ExperimentConfig& c) { return config_hash(c); })
      .def_static("parse", &parse_config, py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def("__eq__", [](const ExperimentConfig& x, const ExperimentConfig& y) { return x == y; });

  m.def("stability", [](const ExperimentConfig& c) {
    const DerivedCoeffs d = stability_check(c.model(), c.equilibrium());
    py::dict out;
    out["margin"] = d.margin;
    out["sigma"] = d.sigma;
    out["stable"] = d.stable;
    return out;
  }, py::arg("config"));

  m.def("roots", [](const ExperimentConfig& c, double k) {
    const Roots r = labelled_roots(c.model(), c.equilibrium(), k);
    return std::vector<Complex>(r.begin(), r.end());
  }, py::arg("config"), py::arg("k"), "Labelled roots (lambda_1, lambda_2, lambda_3) at |k|.");

  m.def("propagator", [](const ExperimentConfig& c, double k, double t) {
    return Eigen::Matrix3cd(LongitudinalPropagator(c.model(), c.equilibrium(), k).at(t));
  }, py::arg("config"), py::arg("k"), py::arg("t"), "exp(A(|k|) t) on (rho, i k.u, phi).");

  m.def("generator", [](const ExperimentConfig& c, double k) {
    return Eigen::Matrix3cd(assemble_A(c.model(), c.equilibrium(), k));
  }, py::arg("config"), py::arg("k"));

  m.def("kappa_select", [](const ExperimentConfig& c) {
    const LyapunovWeights w = kappa_select(c.model(), c.equilibrium());
    py::dict out;
    out["kappa"] = w.kappa;
    out["lambda"] = w.lambda;
    out["c_low"] = w.c_low;
    out["c_high"] = w.c_high;
    return out;
  }, py::arg("config"));

  m.def("linear_decay_curve",
        [](const ExperimentConfig& c, const std::vector<double>& times, const std::string& qty,
           double q) {
          const Quantity quantity = quantity_from_string(qty);
          TimeSeries ts;
          {
            py::gil_scoped_release release;
            ts = linear_decay_curve(c.model(), c.equilibrium(), c.radial_profile(), times,
                                    quantity, q);
          }
          return to_array(ts.values);
        },
        py::arg("config"), py::arg("times"), py::arg("quantity"), py::arg("q") = 2.0);

  m.def("fit_decay",
        [](const std::vector<double>& t, const std::vector<double>& v, double lo, double hi,
           bool allow_low_r2) {
          const DecayFit f = fit_decay(TimeSeries{t, v}, FitWindow{lo, hi}, allow_low_r2);
          py::dict out;
          out["exponent"] = f.exponent;
          out["intercept"] = f.intercept;
          out["r2"] = f.r2;
          out["samples"] = f.samples;
          out["steep"] = f.steep;
          out["exponential_like"] = f.exponential_like;
          return out;
        },
        py::arg("t"), py::arg("v"), py::arg("lo") = 10.0, py::arg("hi") = kInf,
        py::arg("allow_low_r2") = false);

  m.def("theory_exponent", &theory_exponent, py::arg("quantity"), py::arg("q") = 2.0,
        py::arg("dim") = 3);

  m.def("simulate", &simulate_py, py::arg("config"), py::arg("compare_wave") = false);

  m.def("verify", [](const ExperimentConfig& c, std::uint64_t seed) {
    VerifyOptions vo;
    vo.config = c;
    vo.seed = seed;
    std::vector<CheckResult> results;
    {
      py::gil_scoped_release release;
      results = run_verify(vo);
    }
    py::list out;
    for (const auto& r : results) {
      py::dict d;
      d["name"] = r.name;
      d["status"] = to_string(r.status);
      d["value"] = r.value;
      d["detail"] = r.detail;
      out.append(d);
    }
    return out;
  }, py::arg("config") = ExperimentConfig{}, py::arg("seed") = 0);
}
