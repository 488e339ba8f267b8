#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dmkp/cli.hpp"
#include "dmkp/duhamel.hpp"
#include "dmkp/error.hpp"
#include "dmkp/illposed.hpp"
#include "dmkp/init.hpp"
#include "dmkp/io.hpp"
#include "dmkp/norms.hpp"
#include "dmkp/propagator.hpp"

namespace py = pybind11;
using namespace dmkp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Physical samples in (ny, nx) layout, the same order as FLD1.
SpectralField to_spectral(const Array& u, double lx, double ly) {
  if (u.ndim() != 2) throw ConfigError("expected a 2-D array of shape (ny, nx)");
  auto g = build_grid(static_cast<int>(u.shape(1)), static_cast<int>(u.shape(0)), lx, ly);
  RealField f(g);
  std::copy(u.data(), u.data() + u.size(), f.values.begin());
  return forward(f);
}

Array to_array(const SpectralField& F) {
  const RealField f = inverse(F);
  Array out({f.grid->ny(), f.grid->nx()});
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral solver and norm probes for the dissipation-modified KP equation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<NonConvergence>(m, "NonConvergence", numerical.ptr());
  py::register_exception<Instability>(m, "Instability", numerical.ptr());
  py::register_exception<DegenerateFrequency>(m, "DegenerateFrequency", numerical.ptr());

  py::enum_<DissipationKind>(m, "DissipationKind")
      .value("dmkp", DissipationKind::dmkp)
      .value("burgers", DissipationKind::burgers)
      .value("none", DissipationKind::none);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double alpha, double beta, double epsilon, DissipationKind d) {
             ModelParams p{alpha, beta, epsilon, d};
             p.validate();
             return p;
           }),
           py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("epsilon") = 1.0,
           py::arg("dissipation") = DissipationKind::dmkp)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("epsilon", &ModelParams::epsilon)
      .def_readwrite("dissipation", &ModelParams::dissipation)
      .def("__repr__", [](const ModelParams& p) {
        std::ostringstream s;
        s << "ModelParams(alpha=" << p.alpha << ", beta=" << p.beta << ", epsilon=" << p.epsilon
          << ", dissipation=" << to_string(p.dissipation) << ")";
        return s.str();
      });

  m.def("preset", [](const std::string& name, double alpha, double epsilon) {
    return preset_by_name(name, alpha, epsilon);
  }, py::arg("name"), py::arg("alpha") = 1.0, py::arg("epsilon") = 1.0);

  m.def("dispersion", py::vectorize([](double xi, double eta, ModelParams p) { return dispersion(xi, eta, p); }),
        py::arg("xi"), py::arg("eta"), py::arg("params"));
  m.def("dissipation", py::vectorize([](double xi, ModelParams p) { return dissipation(xi, p); }),
        py::arg("xi"), py::arg("params"));
  m.def("lambda_symbol", &lambda_symbol, py::arg("xi"), py::arg("params"));
  m.def("resonance", &resonance, py::arg("xi"), py::arg("eta"), py::arg("xi1"), py::arg("eta1"), py::arg("params"));
  m.def("dissipation_gap", &dissipation_gap, py::arg("xi"), py::arg("xi1"), py::arg("params"));

  m.def("apply_semigroup", [](const Array& u, double lx, double ly, double t, const ModelParams& p) {
    return to_array(apply_semigroup(to_spectral(u, lx, ly), t, p));
  }, py::arg("u"), py::arg("lx"), py::arg("ly"), py::arg("t"), py::arg("params"));

  m.def("simulate", [](const Array& u0, double lx, double ly, double T, double dt, const ModelParams& p) {
    SpectralField phi = to_spectral(u0, lx, ly);
    SimState end;
    {
      py::gil_scoped_release release;
      end = simulate(phi, T, dt, p);
    }
    return to_array(end.field);
  }, py::arg("u0"), py::arg("lx"), py::arg("ly"), py::arg("T"), py::arg("dt"), py::arg("params"),
     "IF-RK4 solution at time T. The data are dealiased and their x-mean removed first.");

  m.def("energy_residuals", [](const Array& u0, double lx, double ly, double T, double dt, const ModelParams& p) {
    EnergyMonitor mon(p);
    simulate(to_spectral(u0, lx, ly), T, dt, p, [&](const SimState& s) { mon.record(s); });
    std::vector<double> out;
    for (const auto& row : mon.rows()) out.push_back(row.residual);
    return out;
  }, py::arg("u0"), py::arg("lx"), py::arg("ly"), py::arg("T"), py::arg("dt"), py::arg("params"));

  m.def("picard", [](const Array& u0, double lx, double ly, double T, int n_steps, const ModelParams& p, int max_iter,
                     double tol) {
    const auto res = picard_solve(to_spectral(u0, lx, ly), T, n_steps, p, {max_iter, tol});
    return py::make_tuple(to_array(res.trajectory.fields.back()), res.residuals);
  }, py::arg("u0"), py::arg("lx"), py::arg("ly"), py::arg("T"), py::arg("n_steps"), py::arg("params"),
     py::arg("max_iter") = 50, py::arg("tol") = 1e-10,
     "Picard iteration on [0, T]; returns (u(T), residuals). Raises NonConvergence.");

  m.def("l2_norm", [](const Array& u, double lx, double ly) { return l2_norm(to_spectral(u, lx, ly)); },
        py::arg("u"), py::arg("lx"), py::arg("ly"));
  m.def("sobolev_norm", [](const Array& u, double lx, double ly, double s1, double s2) {
    return sobolev_norm(to_spectral(u, lx, ly), s1, s2);
  }, py::arg("u"), py::arg("lx"), py::arg("ly"), py::arg("s1"), py::arg("s2"));

  m.def("bourgain_norm_free_wave", [](const Array& phi, double lx, double ly, double b, double s1, double s2, double dt,
                                      const ModelParams& p) {
    const auto f = windowed_free_wave(to_spectral(phi, lx, ly), 1.0, 0.5, dt, p);
    return bourgain_norm(f, {b, s1, s2}, p);
  }, py::arg("phi"), py::arg("lx"), py::arg("ly"), py::arg("b"), py::arg("s1"), py::arg("s2"), py::arg("dt"),
     py::arg("params"), "X^{b,s1,s2} norm of theta(t) W(t) phi on the window [-2.5, 2.5].");

  m.def("random_field", [](int nx, int ny, double lx, double ly, std::uint64_t seed, double slope, int band,
                           double amplitude) {
    return to_array(random_field(build_grid(nx, ny, lx, ly), seed, slope, band, amplitude));
  }, py::arg("nx"), py::arg("ny"), py::arg("lx"), py::arg("ly"), py::arg("seed"), py::arg("slope") = -2.0,
     py::arg("band") = 0, py::arg("amplitude") = 1.0);

  m.def("kernel", [](double xi, double eta, double xi1, double eta1, double t, const ModelParams& p) {
    return kernel({xi, eta}, {xi1, eta1}, t, p);
  }, py::arg("xi"), py::arg("eta"), py::arg("xi1"), py::arg("eta1"), py::arg("t"), py::arg("params"));
  m.def("time_schedule", &time_schedule, py::arg("N"), py::arg("eps"));
  m.def("phi_norm", [](double N, double s) { return phi_norm(RectangleData{N, s}); }, py::arg("N"), py::arg("s"));
  m.def("iterate_norm", [](double N, double s, double eps, const ModelParams& p) {
    py::gil_scoped_release release;
    return iterate_norm(N, s, eps, p, ScanConfig{});
  }, py::arg("N"), py::arg("s"), py::arg("eps") = 0.1, py::arg("params"));
  m.def("scan", [](std::vector<double> n_values, std::vector<double> s_values, double eps, const ModelParams& p) {
    ScanConfig cfg;
    cfg.n_values = std::move(n_values);
    cfg.s_values = std::move(s_values);
    cfg.eps = eps;
    ScanResult res;
    {
      py::gil_scoped_release release;
      res = scan_and_fit(cfg, p);
    }
    py::list rows;
    for (const auto& r : res.rows) rows.append(py::make_tuple(r.N, r.s, r.norm, r.phi_norm));
    return py::make_tuple(rows, res.slopes);
  }, py::arg("n_values"), py::arg("s_values"), py::arg("eps") = 0.1, py::arg("params"),
     "Returns ([(N, s, norm, phi_norm)], {s: slope}).");

  m.def("read_fld1", [](const std::string& path) {
    const auto snap = read_fld1(path);
    Array out({snap.field.grid->ny(), snap.field.grid->nx()});
    std::copy(snap.field.values.begin(), snap.field.values.end(), out.mutable_data());
    return py::make_tuple(out, snap.field.grid->lx(), snap.field.grid->ly(), snap.time);
  }, py::arg("path"), "Returns (samples of shape (ny, nx), lx, ly, time).");
  m.def("write_fld1", [](const std::string& path, const Array& u, double lx, double ly, double time) {
    if (u.ndim() != 2) throw ConfigError("expected a 2-D array of shape (ny, nx)");
    RealField f(build_grid(static_cast<int>(u.shape(1)), static_cast<int>(u.shape(0)), lx, ly));
    std::copy(u.data(), u.data() + u.size(), f.values.begin());
    write_fld1(path, f, time);
  }, py::arg("path"), py::arg("u"), py::arg("lx"), py::arg("ly"), py::arg("time"));

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "dmkp_lab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command-line tool in process; returns (exit code, stdout, stderr).");
}
