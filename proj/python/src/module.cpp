#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "npc/cli.hpp"
#include "npc/cusp.hpp"
#include "npc/decider.hpp"
#include "npc/instance_io.hpp"
#include "npc/oracle.hpp"
#include "npc/render.hpp"

namespace py = pybind11;
using namespace npc;

namespace {

py::object to_py(const Integer& v) {
  const std::string s = v.str();
  return py::reinterpret_steal<py::object>(PyLong_FromString(s.c_str(), nullptr, 10));
}

Integer from_py(const py::handle& v) {
  return Integer(py::str(py::int_(py::reinterpret_borrow<py::object>(v))).cast<std::string>());
}

py::object to_py(const Rational& v) {
  static const py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(to_py(numerator(v)), to_py(denominator(v)));
}

Rational rational_from_py(const py::handle& v) {
  return parse_rational(py::str(v).cast<std::string>());
}

RawVector raw_from_py(const py::handle& v) {
  const auto t = py::reinterpret_borrow<py::sequence>(v);
  if (t.size() != 2) throw Error(ErrorCode::InvalidInput, "lattice vectors have two entries");
  return {from_py(t[0]), from_py(t[1])};
}

py::tuple vector_to_py(const LatticeVector& v) { return py::make_tuple(to_py(v.p()), to_py(v.q())); }

py::tuple form_to_py(const QuadraticForm& f) {
  return py::make_tuple(to_py(f.a11), to_py(f.a12), to_py(f.a22));
}

WitnessConfiguration witness_from_py(const py::sequence& forms) {
  WitnessConfiguration w;
  for (const auto& item : forms) {
    const auto t = py::reinterpret_borrow<py::sequence>(item);
    if (t.size() != 3) throw Error(ErrorCode::InvalidInput, "forms have three coefficients");
    w.forms.push_back(QuadraticForm::positive_definite(
        rational_from_py(t[0]), rational_from_py(t[1]), rational_from_py(t[2])));
  }
  return w;
}

std::string str_of(const auto& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

py::dict verdict_to_py(const Verdict& v) {
  py::list stages;
  for (const ConvexStage& s : v.stages) stages.append(str_of(s));
  py::dict out;
  out["feasible"] = v.feasible;
  out["stages"] = stages;
  out["final_shadow"] = str_of(v.reason.final_shadow);
  out["final_case"] = std::string(to_string(v.reason.final_case));
  out["contacts"] = v.reason.contacts;
  out["reason"] = v.reason.summary;
  return out;
}

cusp::DoublyWarpedMetric named_metric(const std::string& profile, double target, double phi_scale) {
  using namespace cusp;
  if (profile == "hyperbolic") return {exponential_profile(), exponential_profile()};
  if (profile == "interp") return {interpolation_profile(target, phi_scale), exponential_profile()};
  throw Error(ErrorCode::InvalidInput, "unknown profile " + profile);
}

}  // namespace

PYBIND11_MODULE(_npc, m) {
  m.doc() = "Exact feasibility decisions for nonpositively curved chain graph-manifolds";

  static py::exception<Error> error(m, "NpcError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.code())) + ": " + e.what();
      PyErr_SetString(error.ptr(), msg.c_str());
    }
  });

  py::class_<GluingData>(m, "Instance")
      .def(py::init([](const py::sequence& b_first, const py::sequence& fibers,
                       const py::sequence& b_last) {
             RawGluingData raw{raw_from_py(b_first), {}, raw_from_py(b_last)};
             for (const auto& f : fibers) raw.f.push_back(raw_from_py(f));
             return validate_instance(raw);
           }),
           py::arg("b_first"), py::arg("fibers"), py::arg("b_last"))
      .def_property_readonly("n", &GluingData::n)
      .def_property_readonly("b_first", [](const GluingData& d) { return vector_to_py(d.b_first()); })
      .def_property_readonly("b_last", [](const GluingData& d) { return vector_to_py(d.b_last()); })
      .def_property_readonly("fibers",
                             [](const GluingData& d) {
                               py::list out;
                               for (const auto& f : d.f()) out.append(vector_to_py(f));
                               return out;
                             })
      .def("serialize", [](const GluingData& d) { return serialize_instance(d); })
      .def("__eq__", [](const GluingData& a, const GluingData& b) { return a == b; })
      .def("__repr__", [](const GluingData& d) { return "<Instance n=" + std::to_string(d.n()) + ">"; });

  m.def("parse_instance", [](const std::string& text) { return parse_instance(text).data; },
        py::arg("text"));
  m.def("shear_family", &shear_family_instance, py::arg("n"));

  m.def("decide", [](const GluingData& d) { return verdict_to_py(decide(d)); }, py::arg("instance"));

  m.def("witness",
        [](const GluingData& d) {
          py::list out;
          for (const auto& f : construct_witness(d).forms) out.append(form_to_py(f));
          return out;
        },
        py::arg("instance"), "Exact witness forms (a11, a12, a22); raises if infeasible.");

  m.def("check_witness",
        [](const GluingData& d, const py::sequence& forms) {
          const WitnessCheck c = check_witness(d, witness_from_py(forms));
          return py::make_tuple(c.ok, c.reason);
        },
        py::arg("instance"), py::arg("forms"));

  m.def("cross_check",
        [](const GluingData& d, std::uint64_t budget, std::uint64_t seed) {
          const ConcordanceReport r = cross_check(d, SearchOptions{budget, seed});
          py::dict out;
          out["outcome"] = std::string(to_string(r.outcome));
          out["decided_feasible"] = r.decided_feasible;
          out["exact_confirmed"] = r.exact_confirmed;
          out["detail"] = r.detail;
          if (r.approx) {
            py::list points;
            for (const auto& p : r.approx->points) points.append(py::make_tuple(p.x, p.y));
            out["points"] = points;
            out["residual"] = r.approx->residual;
          }
          return out;
        },
        py::arg("instance"), py::arg("budget") = 100000, py::arg("seed") = 0);

  m.def("render_svg",
        [](const GluingData& d) {
          const Verdict v = decide(d);
          std::vector<QuadraticForm> forms;
          if (v.feasible) forms = construct_witness(d).forms;
          return render_svg(make_scene(d, v, forms));
        },
        py::arg("instance"));

  m.def("sectional_curvatures",
        [](const std::string& profile, double t, double target, double phi_scale) {
          return cusp::sectional_curvatures(named_metric(profile, target, phi_scale), t);
        },
        py::arg("profile"), py::arg("t"), py::arg("target") = 2.0, py::arg("phi_scale") = 8.0);

  m.def("max_curvature",
        [](const std::string& profile, double lo, double hi, std::size_t grid, double target,
           double phi_scale) {
          return cusp::verify_nonpositive(named_metric(profile, target, phi_scale), grid, lo, hi)
              .max_curvature;
        },
        py::arg("profile"), py::arg("lo"), py::arg("hi"), py::arg("grid") = 1000,
        py::arg("target") = 2.0, py::arg("phi_scale") = 8.0);

  m.def("run_cli",
        [](std::vector<std::string> args) {
          args.insert(args.begin(), "npc");
          std::vector<char*> argv;
          for (auto& a : args) argv.push_back(a.data());
          std::ostringstream out, err;
          const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the npc tool in-process; returns (exit code, stdout, stderr).");
}
