#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "starnet/chain.hpp"
#include "starnet/cli.hpp"
#include "starnet/config.hpp"
#include "starnet/entangle.hpp"
#include "starnet/experiments.hpp"
#include "starnet/lindblad.hpp"
#include "starnet/qops.hpp"
#include "starnet/star.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

starnet::chain::ChainSpec make_chain(int m, std::vector<int> lost, double r_nm, double delta_ratio, double kappa_hz,
                                     bool nnn) {
  starnet::chain::ChainSpec spec;
  spec.m_chain = m;
  spec.lost_sites = std::move(lost);
  spec.spacing_nm = r_nm;
  spec.delta_ratio = delta_ratio;
  spec.kappa_hz = kappa_hz;
  spec.include_nnn = nnn;
  spec.validate();
  return spec;
}

double t2_seconds(double t2_ms) { return t2_ms * 1e-3; }

py::dict em_dict(const starnet::entangle::EmResult& r) {
  return py::dict("e_m"_a = r.e_m, "coarse_e_m"_a = r.coarse_e_m, "tau_star_kappa"_a = r.tau_star_dimensionless,
                  "tau_star_s"_a = r.tau_star_s, "interior"_a = r.interior, "window_extended"_a = r.window_extended,
                  "tau_kappa"_a = r.tau_dimensionless, "tau_s"_a = r.tau_s, "e_f"_a = r.e_f,
                  "pair_at_peak"_a = r.pair_at_peak);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  using namespace starnet;
  m.doc() = "Star-network entanglement distribution core";
  m.attr("__version__") = STARNET_VERSION;

  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
  static py::exception<PhysicsRejection> rejection(m, "PhysicsRejection", PyExc_ValueError);
  static py::exception<NumericalFailure> numerical(m, "NumericalFailure", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      py::set_error(invalid, e.what());
    } catch (const PhysicsRejection& e) {
      py::set_error(rejection, e.what());
    } catch (const NumericalFailure& e) {
      py::set_error(numerical, e.what());
    }
  });

  m.def("partial_trace", [](const Matrix& rho, const std::vector<int>& keep) {
        return partial_trace(QDensity(rho), keep).matrix();
      },
      "rho"_a, "keep"_a);
  m.def("concurrence", [](const Matrix& rho) { return entangle::concurrence(QDensity(rho)); }, "rho"_a);
  m.def("eof", [](const Matrix& rho) { return entangle::eof(QDensity(rho)); }, "rho"_a);
  m.def("eof_from_concurrence", &entangle::eof_from_concurrence, "c"_a);

  m.def("star_hamiltonian",
        [](int n, double coupling, bool cartesian) {
          const auto norm = cartesian ? star::Normalization::Cartesian : star::Normalization::RaisingLowering;
          return Matrix(star::build_star_hamiltonian({n, coupling}, norm).matrix());
        },
        "n"_a = 3, "coupling"_a = 1.0, "cartesian"_a = false);
  m.def("star_spectrum",
        [](int n, double coupling) {
          py::list out;
          for (const auto& e : star::star_spectrum_analytic({n, coupling})) {
            out.append(py::make_tuple(e.j, e.m, e.energy, e.multiplicity));
          }
          return out;
        },
        "n"_a = 3, "coupling"_a = 1.0, "(j, m, energy, multiplicity) per level");
  m.def("w_state",
        [](int n, int outcome, double coupling) {
          const auto r = star::w_state_protocol(star::StarSpec{n, coupling}, outcome);
          return py::make_tuple(r.probability, Vector(r.outer_state.amplitudes()));
        },
        "n"_a = 3, "outcome"_a = 0, "coupling"_a = 1.0);
  m.def("dicke_state", [](int n, int k) { return Vector(star::dicke_state(n, k).amplitudes()); }, "n"_a, "k"_a);

  m.def("validate_star_geometry", &chain::validate_star_geometry, "n_outer"_a, "m_chain"_a);
  m.def("loss_configurations", &chain::loss_configurations, "m_chain"_a, "n_lost"_a);
  m.def("chain_hopping",
        [](int mc, std::vector<int> lost, double r_nm, double delta_ratio, double kappa_hz, bool nnn) {
          const auto graph = chain::build_coupling_graph(make_chain(mc, std::move(lost), r_nm, delta_ratio, kappa_hz, nnn));
          return py::make_tuple(chain::hopping_matrix(graph), graph.site_map);
        },
        "m"_a = 3, "lost"_a = std::vector<int>{}, "r_nm"_a = 10.0, "delta_ratio"_a = 0.9, "kappa_hz"_a = 26e3,
        "nnn"_a = true, "hopping matrix (rad/s) over surviving sites and their lattice labels");

  m.def("max_entanglement_scan",
        [](int mc, double t2_ms, std::vector<int> lost, int samples, double t_end, double r_nm, double delta_ratio,
           double kappa_hz, bool nnn) {
          const auto spec = make_chain(mc, std::move(lost), r_nm, delta_ratio, kappa_hz, nnn);
          entangle::ScanOptions opts;
          opts.n_samples = samples;
          opts.window_s = t_end > 0.0 ? t_end / spec.kappa_angular() : 0.0;
          entangle::EmResult res;
          {
            py::gil_scoped_release release;
            res = entangle::max_entanglement_scan(spec, lindblad::NoiseSpec{t2_seconds(t2_ms)}, opts);
          }
          return em_dict(res);
        },
        "m"_a = 3, "t2_ms"_a = 1.0, "lost"_a = std::vector<int>{}, "samples"_a = 2001, "t_end"_a = 0.0,
        "r_nm"_a = 10.0, "delta_ratio"_a = 0.9, "kappa_hz"_a = 26e3, "nnn"_a = true);

  m.def("fit_exponential",
        [](const std::vector<std::tuple<int, double, double>>& rows) {
          std::vector<experiments::GridPoint> points;
          for (const auto& [mc, t2_s, e_m] : rows) points.push_back({mc, t2_s, e_m});
          const auto f = experiments::fit_exponential(points);
          return py::dict("prefactor"_a = f.prefactor, "a"_a = f.a, "b"_a = f.b, "residual"_a = f.residual,
                          "n_used"_a = f.n_used, "n_excluded"_a = f.n_excluded);
        },
        "rows"_a, "rows of (M, T2 in seconds, E_m)");

  m.def("gradient_coherence",
        [](const Matrix& pair, std::vector<double> times, double gx, double gy, double d_nm, double gamma,
           std::pair<double, double> a, std::pair<double, double> b) {
          experiments::GradientSpec g;
          g.gx = gx;
          g.gy = gy;
          g.d_nm = d_nm;
          g.gamma = gamma;
          g.times = std::move(times);
          return experiments::gradient_coherence(QDensity(pair), g, {a.first, a.second}, {b.first, b.second});
        },
        "pair"_a, "times"_a, "gx"_a, "gy"_a = 0.0, "d_nm"_a = 50.0, "gamma"_a = experiments::GradientSpec{}.gamma,
        "a"_a = std::pair<double, double>{0.0, 0.0}, "b"_a = std::pair<double, double>{50.0, 0.0});
  m.def("ideal_pair", [] { return Matrix(experiments::ideal_pair().matrix()); });
  m.def("estimate_gradient",
        [](const std::vector<double>& times, const std::vector<double>& values, double gamma, double d_nm) {
          const auto e = experiments::estimate_gradient(times, values, gamma, d_nm);
          return py::dict("gradient"_a = e.gradient, "omega"_a = e.omega, "amplitude"_a = e.amplitude,
                          "phase"_a = e.phase, "rms_residual"_a = e.rms_residual);
        },
        "times"_a, "values"_a, "gamma"_a = experiments::GradientSpec{}.gamma, "d_nm"_a = 50.0);

  m.def("run",
        [](const std::string& command, const std::map<std::string, std::string>& values) {
          const auto cfg = config::resolve(command, {}, values);
          std::ostringstream err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = cli::run(cfg, err);
          }
          return py::make_tuple(code, err.str());
        },
        "command"_a, "values"_a = std::map<std::string, std::string>{},
        "run a CLI command; returns (exit_code, error_text)");
}
