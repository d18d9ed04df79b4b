#include "pdfrac/diagnostics.hpp"
#include "pdfrac/errors.hpp"
#include "pdfrac/integrator.hpp"
#include "pdfrac/io.hpp"
#include "pdfrac/parallel.hpp"
#include "pdfrac/scenario.hpp"
#include "pdfrac/verification.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

namespace py = pybind11;
using namespace pdfrac;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(std::span<const Vec2> v) {
  Array out({static_cast<py::ssize_t>(v.size()), py::ssize_t{2}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < v.size(); ++i) {
    a(i, 0) = v[i].x;
    a(i, 1) = v[i].y;
  }
  return out;
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<Vec2> to_vec2(const Array &a, std::size_t expected) {
  if (a.ndim() != 2 || a.shape(1) != 2 || static_cast<std::size_t>(a.shape(0)) != expected)
    throw py::value_error("expected an array of shape (" + std::to_string(expected) + ", 2)");
  auto r = a.unchecked<2>();
  std::vector<Vec2> out(expected);
  for (std::size_t i = 0; i < expected; ++i)
    out[i] = {r(i, 0), r(i, 1)};
  return out;
}

py::dict record_dict(const DiagnosticRecord &r) {
  py::dict d;
  d["t"] = r.t;
  d["kinetic"] = r.kinetic;
  d["pd"] = r.pd;
  d["total"] = r.total;
  d["augmented"] = r.augmented;
  d["pe"] = r.pe;
  d["ge"] = r.ge;
  d["crack_length"] = r.crack_length;
  d["max_z"] = r.max_z;
  d["u_l2"] = r.u_l2;
  d["v_l2"] = r.v_l2;
  return d;
}

// A configured scenario together with its integrator.
class Simulation {
public:
  explicit Simulation(const ScenarioConfig &config) : s_(instantiate(config)) {
    integ_ = std::make_unique<Integrator>(*s_.op, s_.collars, s_.body, config.dt, s_.initial);
  }

  void advance(std::size_t steps) {
    py::gil_scoped_release release;
    integ_->advance(steps);
  }

  // Advances to the configured final time, returning diagnostics every
  // `stride` steps (and at the end).
  py::list run(std::size_t stride) {
    if (stride == 0)
      throw py::value_error("stride must be positive");
    std::vector<DiagnosticRecord> rows;
    const std::size_t last = s_.plan.steps();
    {
      py::gil_scoped_release release;
      while (integ_->step_index() < last) {
        const std::size_t k = integ_->step_index();
        if (k % stride == 0)
          rows.push_back(diagnose(*s_.op, integ_->state(), s_.tips));
        integ_->advance();
      }
      rows.push_back(diagnose(*s_.op, integ_->state(), s_.tips));
    }
    py::list out;
    for (const auto &r : rows)
      out.append(record_dict(r));
    return out;
  }

  py::dict diagnostics() const { return record_dict(diagnose(*s_.op, integ_->state(), s_.tips)); }

  Array damage() const { return to_array(damage_field(*s_.op, integ_->state().u)); }

  Array force(const Array &u) const {
    return to_array(s_.op->assemble(to_vec2(u, s_.op->size()), integ_->state().t));
  }

  Array coordinates() const {
    const Grid &g = s_.disc->grid;
    std::vector<Vec2> x(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      x[i] = g.coord(i);
    return to_array(x);
  }

  Array u() const { return to_array(integ_->state().u); }
  Array v() const { return to_array(integ_->state().v); }
  void set_u(const Array &a) { integ_->state().u = to_vec2(a, s_.op->size()); }
  void set_v(const Array &a) { integ_->state().v = to_vec2(a, s_.op->size()); }

  double t() const { return integ_->state().t; }
  std::size_t step_index() const { return integ_->step_index(); }
  std::size_t steps() const { return s_.plan.steps(); }
  std::size_t nodes() const { return s_.op->size(); }
  std::size_t bonds() const { return s_.disc->bonds.bonds(); }
  double h() const { return s_.config.h; }
  double dt() const { return s_.config.dt; }
  double horizon() const { return s_.config.horizon; }
  std::string name() const { return s_.config.name; }

private:
  Scenario s_;
  std::unique_ptr<Integrator> integ_;
};

ScenarioConfig resolve(const std::string &source) {
  // A preset name, a config text or a path to a config file.
  for (const auto &p : preset_list())
    if (p.name == source)
      return preset(source);
  if (source.find('\n') != std::string::npos || source.find('=') != std::string::npos)
    return parse_config(source);
  return load_config(source);
}

} // namespace

PYBIND11_MODULE(pdfrac, m) {
  m.doc() = "State-based peridynamic fracture simulation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedConfiguration>(m, "UnsupportedConfiguration",
                                                   PyExc_NotImplementedError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<TensilePotential>(m, "TensilePotential")
      .def(py::init<double, double>(), py::arg("c"), py::arg("beta"))
      .def("value", &TensilePotential::value)
      .def("first", &TensilePotential::first)
      .def("second", &TensilePotential::second)
      .def_property_readonly("inflection", &TensilePotential::inflection)
      .def_property_readonly("asymptote", &TensilePotential::asymptote);

  py::class_<DilatationalPotential>(m, "DilatationalPotential")
      .def_static("quadratic", &DilatationalPotential::quadratic, py::arg("stiffness"))
      .def_static("convex_concave", &DilatationalPotential::convex_concave, py::arg("c_g"),
                  py::arg("beta_g"))
      .def("value", &DilatationalPotential::value)
      .def("first", &DilatationalPotential::first)
      .def("second", &DilatationalPotential::second);

  py::class_<MaterialModel>(m, "MaterialModel")
      .def_readonly("density", &MaterialModel::density)
      .def_readonly("horizon", &MaterialModel::horizon)
      .def_readonly("tensile", &MaterialModel::tensile)
      .def_readonly("dilatational", &MaterialModel::dilatational)
      .def_readonly("fracture_toughness", &MaterialModel::fracture_toughness)
      .def_readonly("bulk_modulus", &MaterialModel::bulk_modulus);

  m.def("material_preset", [](const std::string &name, double horizon) {
    return material_preset(name, horizon);
  }, py::arg("name"), py::arg("horizon"));
  m.def("lipschitz_constant", &lipschitz_constant);
  m.def("critical_bond_strain", &critical_bond_strain, py::arg("tensile"), py::arg("length"));
  m.def("stable_dt_estimate", &stable_dt_estimate, py::arg("h"), py::arg("bulk_modulus"),
        py::arg("density"));

  m.def("presets", [] {
    py::dict d;
    for (const auto &p : preset_list())
      d[py::str(p.name)] = p.description;
    return d;
  });
  m.def("preset_config", [](const std::string &name) { return format_config(preset(name)); },
        "Config text of a preset, in the format accepted by Simulation.");

  m.def("set_threads", &set_thread_count, py::arg("threads"));
  m.def("threads", &thread_count);

  py::class_<Simulation>(m, "Simulation")
      .def(py::init([](const std::string &source) { return Simulation(resolve(source)); }),
           py::arg("source"), "Preset name, config text or path to a config file.")
      .def("advance", &Simulation::advance, py::arg("steps") = 1)
      .def("run", &Simulation::run, py::arg("stride") = 100)
      .def("diagnostics", &Simulation::diagnostics)
      .def("damage", &Simulation::damage)
      .def("force", &Simulation::force, py::arg("u"))
      .def("coordinates", &Simulation::coordinates)
      .def_property("u", &Simulation::u, &Simulation::set_u)
      .def_property("v", &Simulation::v, &Simulation::set_v)
      .def_property_readonly("t", &Simulation::t)
      .def_property_readonly("step_index", &Simulation::step_index)
      .def_property_readonly("steps", &Simulation::steps)
      .def_property_readonly("nodes", &Simulation::nodes)
      .def_property_readonly("bonds", &Simulation::bonds)
      .def_property_readonly("h", &Simulation::h)
      .def_property_readonly("dt", &Simulation::dt)
      .def_property_readonly("horizon", &Simulation::horizon)
      .def_property_readonly("name", &Simulation::name);

  m.def("oracle_difference", [](int n, double h, double horizon, std::uint64_t seed,
                                double amplitude) {
    auto disc = Discretization::build({{0.0, (n - 1) * h, 0.0, (n - 1) * h}, {}}, h, horizon);
    const MaterialModel mat = material_preset("nu0245", horizon);
    const NonlocalOperator op(disc, mat);
    const auto u = random_field(op.size(), amplitude, seed);
    return max_relative_difference(op.assemble(u), brute_force_force(*disc, mat, u));
  }, py::arg("n"), py::arg("h"), py::arg("horizon"), py::arg("seed") = 1,
     py::arg("amplitude") = 1e-6,
     "Max relative difference between the fast force and the all-pairs reference.");

  m.def("lipschitz_ratios", [](int n, double h, double horizon, int trials, std::uint64_t seed) {
    return lipschitz_l2_suite(material_preset("nu0245", horizon), n, h, trials, seed).ratios;
  }, py::arg("n"), py::arg("h"), py::arg("horizon"), py::arg("trials"), py::arg("seed") = 1);

  m.def("projection_error", [](double gamma, double h) {
    ProjectionField f;
    if (gamma != 1.0) {
      f.kind = ProjectionField::Kind::Weierstrass;
      f.gamma = gamma;
    }
    return projection_error(f, h);
  }, py::arg("gamma"), py::arg("h"));

  m.def("temporal_order", [](const std::string &source, std::vector<double> dts, double dt_ref,
                             double final_time) {
    const ScenarioConfig c = resolve(source);
    py::gil_scoped_release release;
    const auto s = temporal_convergence_study(make_study_runner(c), c.h, dts, dt_ref, final_time);
    return std::make_pair(s.fitted_order, [&] {
      std::vector<double> e;
      for (const auto &r : s.rows)
        e.push_back(r.error);
      return e;
    }());
  }, py::arg("source"), py::arg("dts"), py::arg("dt_ref"), py::arg("final_time"),
     "Returns (fitted order, errors per dt).");

  m.def("convergence_rate", &convergence_rate, py::arg("e12"), py::arg("e23"),
        py::arg("ratio") = 2.0);
}
