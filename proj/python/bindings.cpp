#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gibbs/divergence.hpp"
#include "gibbs/geodesics.hpp"
#include "gibbs/haar.hpp"
#include "gibbs/markov.hpp"

namespace py = pybind11;
using namespace gibbs;

namespace {

Problem problem_of(const std::string& s) {
  if (s == "first") return Problem::first;
  if (s == "second") return Problem::second;
  throw std::invalid_argument("problem must be 'first' or 'second'");
}

template <class F>
double with_family(const std::string& family, const Potential& j0, const Potential& j2, F&& fn) {
  if (family == "j") return fn(JFamily(j0, j2));
  if (family == "log-j") return fn(LogJFamily(j0, j2));
  throw std::invalid_argument("family must be 'j' or 'log-j'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gibbs measures, KL calculus and geodesics on symbolic spaces";

  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<UnsupportedDerivative>(m, "UnsupportedDerivative", PyExc_ValueError);

  py::class_<CylinderFunction>(m, "CylinderFunction")
      .def(py::init<int, int, std::vector<double>>(), py::arg("alphabet"), py::arg("depth"), py::arg("values"))
      .def_static("constant", &CylinderFunction::constant, py::arg("alphabet"), py::arg("value"), py::arg("depth") = 0)
      .def_property_readonly("alphabet", &CylinderFunction::alphabet)
      .def_property_readonly("depth", &CylinderFunction::depth)
      .def_property_readonly("values", &CylinderFunction::values)
      .def("evaluate", [](const CylinderFunction& f, const std::vector<int>& w) { return f.evaluate(Word(f.alphabet(), w)); })
      .def("refine", &CylinderFunction::refine)
      .def("sup_norm", &CylinderFunction::sup_norm)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(double() * py::self);

  py::class_<Potential>(m, "Potential")
      .def_static("raw", &Potential::raw)
      .def_static("normalized", &Potential::normalized, py::arg("function"), py::arg("tol") = kNormTol)
      .def_property_readonly("function", &Potential::function)
      .def_property_readonly("depth", &Potential::depth)
      .def_property_readonly("is_normalized", &Potential::is_normalized);

  py::class_<StochasticMatrix>(m, "StochasticMatrix")
      .def(py::init<std::vector<std::vector<double>>>())
      .def_static("from_rs", &StochasticMatrix::from_rs)
      .def_static("bernoulli", &StochasticMatrix::bernoulli)
      .def("rows", &StochasticMatrix::rows)
      .def_property_readonly("r", &StochasticMatrix::r)
      .def_property_readonly("s", &StochasticMatrix::s);

  m.def("normalize", [](const Potential& b) { return normalize(b); });
  m.def("pressure", [](const Potential& b) { return pressure(b); });
  m.def("normalization_residual", &normalization_residual);
  m.def("entropy", &entropy);
  m.def("apply_ruelle", py::overload_cast<const Potential&, const CylinderFunction&>(&apply_ruelle));
  m.def("kernel_project", [](const Potential& a, const CylinderFunction& f) { return kernel_project(a, f).value(); });
  m.def("gibbs_weights", [](const Potential& a, int depth) { return gibbs_measure(a, depth).weights(); });

  m.def("stationary_vector", &stationary_vector);
  m.def("jacobian_potential", &jacobian_potential);
  m.def("markov_kl", &markov_kl);
  m.def("markov_entropy", &markov_entropy);

  m.def("kl", py::overload_cast<const Potential&, const Potential&, int>(&kl), py::arg("source"), py::arg("target"),
        py::arg("depth") = kDefaultWorkingDepth);
  m.def(
      "derivative_at",
      [](const std::string& family, const Potential& j0, const Potential& j2, const std::string& problem, int endpoint,
         const Potential& target, int depth) {
        return with_family(family, j0, j2,
                           [&](const auto& f) { return derivative_at(f, problem_of(problem), endpoint, target, depth); });
      },
      py::arg("family"), py::arg("j0"), py::arg("j2"), py::arg("problem"), py::arg("endpoint"), py::arg("target"),
      py::arg("depth") = kDefaultWorkingDepth);
  m.def(
      "derivative_oracle",
      [](const std::string& family, const Potential& j0, const Potential& j2, const std::string& problem, int endpoint,
         const Potential& target, int depth) {
        OracleOptions o;
        o.depth = depth;
        return with_family(family, j0, j2, [&](const auto& f) {
          return derivative_oracle(f, problem_of(problem), endpoint, target, o);
        });
      },
      py::arg("family"), py::arg("j0"), py::arg("j2"), py::arg("problem"), py::arg("endpoint"), py::arg("target"),
      py::arg("depth") = kDefaultWorkingDepth);
  m.def(
      "defects",
      [](const Potential& j0, const Potential& j1, const Potential& j2, int depth) {
        DivergenceReport r = defects(j0, j1, j2, depth);
        py::dict d;
        d["kl"] = r.kl;
        d["pythagorean_type1"] = r.pythagorean_type1;
        d["pythagorean_type2"] = r.pythagorean_type2;
        d["triangle_type1"] = r.triangle_type1;
        d["triangle_type2"] = r.triangle_type2;
        py::dict derivs;
        for (const auto& f : r.derivatives) derivs[py::str(f.name)] = py::make_tuple(f.closed_form, f.oracle);
        d["derivatives"] = derivs;
        d["regime"] = to_string(r.regime);
        return d;
      },
      py::arg("j0"), py::arg("j1"), py::arg("j2"), py::arg("depth") = kDefaultWorkingDepth);
  m.def("bernoulli_three_way", &bernoulli_three_way);

  m.def("maxent_alpha", &maxent_alpha);
  m.def("maxent_beta", &maxent_beta);
  m.def("markov_gamma", &markov_gamma);
  m.def("kernel_rho_hat", &kernel_rho_hat);

  m.def("markov_metric", [](double r, double s) {
    MarkovMetric g = markov_metric(r, s);
    return py::make_tuple(g.grr, g.grs, g.gss);
  });
  m.def("christoffel", [](double r, double s) {
    ChristoffelPair c = christoffel(r, s);
    return py::make_tuple(c.g111, c.g222);
  });
  m.def("markov_levi_civita", &markov_levi_civita);
  m.def(
      "markov_geodesic",
      [](double r, double s, double theta, double t_max, double step, const std::string& model, double tol) {
        MarkovIntegrationOptions o;
        o.tol = tol;
        if (model == "levi-civita") o.model = MarkovModel::levi_civita;
        else if (model != "closed-form") throw std::invalid_argument("model must be 'closed-form' or 'levi-civita'");
        GeodesicPath p = integrate_markov_geodesic(markov_initial_state(r, s, theta), t_max, step, o);
        std::vector<double> rs, ss;
        for (const auto& y : p.states) {
          rs.push_back(y.r);
          ss.push_back(y.s);
        }
        py::dict d;
        d["t"] = p.times;
        d["r"] = rs;
        d["s"] = ss;
        d["energy"] = p.energy;
        d["reason"] = to_string(p.reason);
        return d;
      },
      py::arg("r"), py::arg("s"), py::arg("theta"), py::arg("t_max"), py::arg("step") = 1e-2,
      py::arg("model") = "closed-form", py::arg("tol") = 1e-8);
}
