// Python bindings. Fields cross the boundary as complex128 arrays of shape (N,)*n
// in the library's row-major layout (axis 0 is x1).
#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "potrec/acceptance.hpp"
#include "potrec/config.hpp"
#include "potrec/error.hpp"
#include "potrec/herglotz.hpp"
#include "potrec/norms.hpp"
#include "potrec/potentials.hpp"
#include "potrec/propagate.hpp"
#include "potrec/recover.hpp"
#include "potrec/resolvent.hpp"
#include "potrec/scatter.hpp"

namespace py = pybind11;
using namespace potrec;

namespace {

using Array = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ScalarField to_field(const Grid& g, const Array& a) {
  if (a.ndim() != g.dim()) throw Error(ErrorCode::InvalidArgument, "array rank does not match the grid");
  for (int d = 0; d < g.dim(); ++d)
    if (a.shape(d) != g.points()) throw Error(ErrorCode::InvalidArgument, "array shape does not match the grid");
  return ScalarField(g, std::vector<Complex>(a.data(), a.data() + a.size()));
}

Array to_array(const ScalarField& f) {
  std::vector<py::ssize_t> shape(f.grid().dim(), f.grid().points());
  Array out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Point to_point(const std::vector<double>& xs) {
  if (xs.size() > 3) throw Error(ErrorCode::InvalidArgument, "at most three coordinates");
  Point p{0.0, 0.0, 0.0};
  std::copy(xs.begin(), xs.end(), p.begin());
  return p;
}

PairingMode to_mode(const std::string& s) {
  if (s == "leading") return PairingMode::Leading;
  if (s == "full") return PairingMode::Full;
  throw Error(ErrorCode::InvalidArgument, "mode must be 'leading' or 'full'");
}

py::dict density_dict(const DensityNorms& d) {
  py::dict out;
  out["l1"] = d.l1;
  out["l2"] = d.l2;
  return out;
}

}  // namespace

PYBIND11_MODULE(_potrec, m) {
  m.doc() = "Herglotz waves, scattering corrections and potential recovery";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<Grid>(m, "Grid")
      .def(py::init(&make_grid), py::arg("n"), py::arg("L"), py::arg("N"))
      .def_property_readonly("n", &Grid::dim)
      .def_property_readonly("L", &Grid::half_width)
      .def_property_readonly("N", &Grid::points)
      .def_property_readonly("spacing", &Grid::spacing)
      .def("coordinates", [](const Grid& g) {
        py::array_t<double> x(g.points());
        for (int i = 0; i < g.points(); ++i) x.mutable_at(i) = g.coordinate(i);
        return x;
      })
      .def_static("resolving", [](double L, double lambda, int n) { return make_grid(n, L, std::max(64, resolving_points(L, lambda))); },
                  py::arg("L"), py::arg("lam"), py::arg("n") = 2)
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
      .def("__repr__", [](const Grid& g) {
        return "Grid(n=" + std::to_string(g.dim()) + ", L=" + std::to_string(g.half_width()) +
               ", N=" + std::to_string(g.points()) + ")";
      });

  m.def(
      "potential",
      [](const Grid& g, const std::string& preset, double amplitude, double width, std::vector<double> center,
         double rate) {
        PotentialSpec s;
        s.kind = parse_potential_kind(preset);
        s.amplitude = amplitude;
        s.width = width;
        s.center = to_point(center);
        s.rate = rate;
        return to_array(sample_potential(s, g));
      },
      py::arg("grid"), py::arg("preset"), py::arg("amplitude") = 1.0, py::arg("width") = 1.0,
      py::arg("center") = std::vector<double>{}, py::arg("rate") = 2.0);

  m.def("l2_norm", [](const Grid& g, const Array& a) { return l2_norm(to_field(g, a)); });
  m.def("b_norm", [](const Grid& g, const Array& a) { return b_norm(to_field(g, a)); });
  m.def("b_star_norm", [](const Grid& g, const Array& a) { return b_star_norm(to_field(g, a)); });
  m.def("triple_norm", [](const Grid& g, const Array& a) { return triple_norm(to_field(g, a)); });
  m.def("all_norms", [](const Grid& g, const Array& a) {
    const NormReport r = all_norms(to_field(g, a));
    py::dict d;
    d["l1"] = r.l1;
    d["l2"] = r.l2;
    d["linf"] = r.linf;
    d["triple"] = r.triple;
    d["b"] = r.b;
    d["b_star"] = r.b_star;
    return d;
  });

  m.def(
      "herglotz_wave",
      [](const Grid& g, double lambda, double eps, std::vector<double> direction, int nodes) {
        return to_array(herglotz_wave(lambda, make_cap_density(eps, rotation_to(g.dim(), to_point(direction)), nodes), g));
      },
      py::arg("grid"), py::arg("lam"), py::arg("eps"), py::arg("direction"), py::arg("nodes") = 0);

  m.def(
      "apply_pv",
      [](const Grid& g, double lambda, const Array& f, bool extrapolate) {
        PvSettings s;
        s.extrapolate = extrapolate;
        return to_array(apply_pv(lambda, to_field(g, f), s));
      },
      py::arg("grid"), py::arg("lam"), py::arg("f"), py::arg("extrapolate") = true);

  m.def(
      "solve_correction",
      [](const Grid& g, const Array& V, double lambda, const Array& u, double tol, int max_iter) {
        ScatterConfig cfg;
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        cfg.pv.extrapolate = true;
        const ScatterResult r = solve_correction(to_field(g, V), lambda, to_field(g, u), cfg);
        py::dict d;
        d["v"] = to_array(r.v);
        d["iterations"] = r.iterations;
        d["contraction_ratios"] = r.contraction_ratios;
        d["residual"] = r.residual;
        d["correction_ratio"] = r.correction_ratio;
        return d;
      },
      py::arg("grid"), py::arg("V"), py::arg("lam"), py::arg("u"), py::arg("tol") = 1e-10, py::arg("max_iter") = 200);

  m.def(
      "recover_mode",
      [](const Grid& g, const Array& V1, const Array& V2, std::vector<double> kappa, std::vector<double> lambdas,
         const std::string& mode) {
        const ModePlan plan = make_plan(g.dim(), to_point(kappa), lambdas, to_mode(mode));
        const ModeEstimate e = recover_mode(to_field(g, V1), to_field(g, V2), plan);
        py::list rows;
        for (const ModeSample& s : e.samples) {
          py::dict d;
          d["lam"] = s.lambda;
          d["eps"] = s.eps;
          d["estimate"] = s.estimate;
          d["leading"] = s.leading;
          d["remainder"] = s.remainder;
          d["full"] = s.full;
          d["gamma"] = s.gamma;
          d["normalization"] = s.normalization;
          d["density1"] = density_dict(s.density1);
          d["density2"] = density_dict(s.density2);
          rows.append(d);
        }
        return rows;
      },
      py::arg("grid"), py::arg("V1"), py::arg("V2"), py::arg("kappa"), py::arg("lambdas"),
      py::arg("mode") = "leading");

  m.def("gamma_modulus", [](const Grid& g, const Array& F, double rho) { return gamma_modulus(to_field(g, F), rho); },
        py::arg("grid"), py::arg("F"), py::arg("rho"));
  m.def("fourier_at", [](const Grid& g, const Array& F, std::vector<double> xi) { return fourier_at(to_field(g, F), to_point(xi)); },
        py::arg("grid"), py::arg("F"), py::arg("xi"));

  m.def(
      "propagate",
      [](const Grid& g, const Array& V, const Array& f, double T, double dt) {
        return to_array(initial_to_final(to_field(g, V), to_field(g, f), {T, dt}));
      },
      py::arg("grid"), py::arg("V"), py::arg("f"), py::arg("T"), py::arg("dt"));

  m.def("read_field", [](const std::string& path) {
    const ScalarField f = read_field(path);
    return py::make_tuple(f.grid(), to_array(f));
  });
  m.def("write_field", [](const std::string& path, const Grid& g, const Array& a) { write_field(path, to_field(g, a)); });

  m.def("config_hash", [](const std::string& text) { return Config::parse(text).hash(); });

  m.def(
      "run_criterion",
      [](int id, std::uint64_t seed) {
        AcceptanceOptions opts;
        opts.seed = seed;
        CriterionResult r;
        {
          py::gil_scoped_release release;
          r = run_criterion(id, opts);
        }
        py::dict d;
        d["id"] = r.id;
        d["name"] = r.name;
        d["passed"] = r.passed;
        d["measured"] = r.measured;
        d["target"] = r.target;
        return d;
      },
      py::arg("id"), py::arg("seed") = 20240611);
}
