#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "linmeas/analytics.hpp"
#include "linmeas/canonical.hpp"
#include "linmeas/error.hpp"
#include "linmeas/grid.hpp"
#include "linmeas/model.hpp"
#include "linmeas/packet.hpp"
#include "linmeas/povm.hpp"
#include "linmeas/report_io.hpp"
#include "linmeas/verifier.hpp"

namespace py = pybind11;
using namespace linmeas;

namespace {

py::dict as_dict(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_linmeas, m) {
  m.doc() = "Linear position-measurement models, closed-form analytics and a grid oracle";

  // Messages start with the error kind, e.g. "Unmeasurable: ...".
  py::register_exception<Error>(m, "LinmeasError", PyExc_ValueError);

  py::class_<MomentumMap>(m, "MomentumMap")
      .def_readonly("a1", &MomentumMap::a1)
      .def_readonly("a2", &MomentumMap::a2)
      .def_readonly("b1", &MomentumMap::b1)
      .def_readonly("b2", &MomentumMap::b2)
      .def("__repr__", [](const MomentumMap& x) {
        return "MomentumMap(" + format_double(x.a1) + ", " + format_double(x.a2) + ", " + format_double(x.b1) +
               ", " + format_double(x.b2) + ")";
      });

  py::class_<LinearModel>(m, "LinearModel")
      .def_property_readonly("alpha1", &LinearModel::alpha1)
      .def_property_readonly("alpha2", &LinearModel::alpha2)
      .def_property_readonly("beta1", &LinearModel::beta1)
      .def_property_readonly("beta2", &LinearModel::beta2)
      .def_property_readonly("hbar", &LinearModel::hbar)
      .def_property_readonly("gamma", &LinearModel::gamma)
      .def_property_readonly("name", &LinearModel::name)
      .def_property_readonly("measurable", &LinearModel::measurable)
      .def_property_readonly("conserves_momentum", &LinearModel::conserves_momentum)
      .def("coefficients", &LinearModel::coefficients)
      .def(py::self == py::self)
      .def("__repr__", [](const LinearModel& x) {
        return "LinearModel(" + format_double(x.alpha1()) + ", " + format_double(x.alpha2()) + ", " +
               format_double(x.beta1()) + ", " + format_double(x.beta2()) + ")";
      });

  m.def("make_model", &make_model, py::arg("alpha1"), py::arg("alpha2"), py::arg("beta1"), py::arg("beta2"),
        py::arg("hbar") = 1.0);
  m.def("identity_model", &identity_model, py::arg("hbar") = 1.0);
  m.def("von_neumann", &von_neumann, py::arg("hbar") = 1.0);
  m.def("ozawa", &ozawa, py::arg("hbar") = 1.0);
  m.def("momentum_conserving", &momentum_conserving, py::arg("g0"), py::arg("hbar") = 1.0);
  m.def("catalog_model", &catalog_model, py::arg("name"), py::arg("g0") = 1.0, py::arg("hbar") = 1.0);
  m.def("momentum_map", &momentum_map);
  m.def("inverse", &inverse);

  py::class_<CanonicalExpr>(m, "CanonicalExpr")
      .def(py::init<double, double, double, double, double>(), py::arg("cx0") = 0.0, py::arg("cX0") = 0.0,
           py::arg("cp0") = 0.0, py::arg("cP0") = 0.0, py::arg("cI") = 0.0)
      .def_readwrite("cx0", &CanonicalExpr::cx0)
      .def_readwrite("cX0", &CanonicalExpr::cX0)
      .def_readwrite("cp0", &CanonicalExpr::cp0)
      .def_readwrite("cP0", &CanonicalExpr::cP0)
      .def_readwrite("cI", &CanonicalExpr::cI)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * double())
      .def(double() * py::self)
      .def(-py::self)
      .def(py::self == py::self);
  m.def("commutator", [](const CanonicalExpr& a, const CanonicalExpr& b) { return commutator(a, b).coefficient; },
        "Coefficient c of [a, b] = c * i * hbar.");
  m.def("heisenberg_positions", [](const LinearModel& x) {
    const auto p = heisenberg_positions(x);
    return py::make_tuple(p.object, p.probe);
  });
  m.def("heisenberg_momenta", [](const LinearModel& x) {
    const auto p = heisenberg_momenta(x);
    return py::make_tuple(p.object, p.probe);
  });
  m.def("result_operators", [](const LinearModel& x, double mean) {
    const auto r = result_operators(x, mean);
    return py::make_tuple(r.pre, r.post);
  }, py::arg("model"), py::arg("probe_mean_X0") = 0.0);

  m.def("integrate_hamiltonian", [](const std::string& which, double g0, double hbar) {
    QuadraticHamiltonian h;
    if (which == "von-neumann") h = von_neumann_hamiltonian(g0);
    else if (which == "ozawa") h = ozawa_hamiltonian(g0);
    else if (which == "momentum-conserving") h = momentum_conserving_hamiltonian(g0);
    else throw Error(ErrorKind::InvalidConfig, "unknown Hamiltonian '" + which + "'");
    return integrate_hamiltonian(h, hbar).position;
  }, py::arg("name"), py::arg("g0") = 1.0, py::arg("hbar") = 1.0,
        "Integrates a catalog interaction Hamiltonian and returns the position map.");

  py::class_<MomentSummary>(m, "MomentSummary")
      .def(py::init<double, double, double, double>(), py::arg("mean_x"), py::arg("mean_p"), py::arg("var_x"),
           py::arg("var_p"))
      .def_static("minimal_gaussian", &MomentSummary::minimal_gaussian, py::arg("sigma_x"), py::arg("mean_x") = 0.0,
                  py::arg("mean_p") = 0.0, py::arg("hbar") = 1.0)
      .def_readwrite("mean_x", &MomentSummary::mean_x)
      .def_readwrite("mean_p", &MomentSummary::mean_p)
      .def_readwrite("var_x", &MomentSummary::var_x)
      .def_readwrite("var_p", &MomentSummary::var_p);

  m.def("eps_x0", &eps_x0);
  m.def("eps_xt", &eps_xt);
  m.def("dp_dis", &dp_dis);
  m.def("sigma_x0exp", &sigma_x0exp);
  m.def("eps_ozawa_x0", [](const LinearModel& x, const MomentSummary& o, const MomentSummary& p) {
    const auto e = eps_ozawa_x0(x, o, p);
    return py::make_tuple(e.error, e.bias);
  });
  m.def("eps_ozawa_xt", &eps_ozawa_xt);
  m.def("full_report", [](const LinearModel& x, const MomentSummary& o, const MomentSummary& p) {
    return as_dict(to_json(full_report(x, o, p)));
  });

  py::class_<PacketSpec>(m, "PacketSpec")
      .def_static("gaussian", &PacketSpec::gaussian, py::arg("mean_x"), py::arg("mean_p"), py::arg("sigma_x"),
                  py::arg("hbar") = 1.0)
      .def_static("tabulated", &PacketSpec::tabulated, py::arg("x_first"), py::arg("dx"), py::arg("samples"),
                  py::arg("hbar") = 1.0)
      .def_static("load_tabulated", &PacketSpec::load_tabulated, py::arg("path"), py::arg("hbar") = 1.0)
      .def("amplitude", &PacketSpec::amplitude)
      .def("density", &PacketSpec::density)
      .def("moments", &PacketSpec::moments);

  m.def("oracle_compare", [](const LinearModel& x, const PacketSpec& o, const PacketSpec& p, std::size_t n,
                             double half_width) {
    return as_dict(to_json(compare_with_analytics(x, o, p, GridSpec::symmetric(n, half_width))));
  }, py::arg("model"), py::arg("object"), py::arg("probe"), py::arg("n") = 512, py::arg("half_width") = 12.0);

  m.def("povm_check", [](const LinearModel& x, const PacketSpec& o, const PacketSpec& p, std::size_t bins,
                         double lo, double hi, std::size_t n_object) {
    const Axis axis{n_object, -12.0, 12.0};
    const auto ops = povm(x, p, uniform_partition(lo, hi, bins), axis);
    return as_dict(to_json(check_povm(ops, x, o, p, axis, GridSpec::symmetric(512, 12.0))));
  }, py::arg("model"), py::arg("object"), py::arg("probe"), py::arg("bins") = 16, py::arg("lo") = -6.0,
        py::arg("hi") = 6.0, py::arg("n_object") = 128);

  m.def("verify_random", [](std::size_t count, std::uint64_t seed, double hbar) {
    SweepPlan plan;
    plan.source = SweepPlan::Source::random;
    plan.random_count = count;
    plan.seed = seed;
    plan.hbar = hbar;
    const auto r = verify_relations(plan);
    return py::dict(py::arg("configurations") = r.rows.size(), py::arg("violations") = r.violations(),
                    py::arg("min_slack_64") = r.rel_64.min_slack, py::arg("min_slack_65") = r.rel_65.min_slack,
                    py::arg("min_slack_69") = r.rel_69.min_slack);
  }, py::arg("count"), py::arg("seed") = 1, py::arg("hbar") = 1.0);

  m.def("demo_ozawa_violation", [](double sx, double sX, double hbar) {
    return as_dict(to_json(demo_ozawa_violation(sx, sX, hbar)));
  }, py::arg("sigma_x0") = 1.0, py::arg("sigma_X0") = 0.5, py::arg("hbar") = 1.0);
}
