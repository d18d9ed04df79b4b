#include "pdfrac/scenario.hpp"

#include "pdfrac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pdfrac {

// ---------------------------------------------------------------------------
// Material and collars

MaterialModel MaterialSpec::build(double horizon) const {
  MaterialModel m = material_preset(preset, horizon);
  if (density)
    m.density = *density;
  if (c || beta)
    m.tensile = TensilePotential(c.value_or(m.tensile.c()), beta.value_or(m.tensile.beta()));
  if (cbar)
    m.dilatational = DilatationalPotential::quadratic(*cbar);
  if (c_g || beta_g) {
    if (!c_g || !beta_g)
      throw ConfigError("[material] c_g and beta_g must be given together");
    m.dilatational = DilatationalPotential::convex_concave(*c_g, *beta_g);
  }
  if (influence == "linear")
    m.influence = InfluenceFunction::linear_decay();
  else if (influence == "constant")
    m.influence = InfluenceFunction::constant(1.0);
  else
    throw ConfigError("[material] influence must be 'linear' or 'constant'");
  if (fracture_toughness)
    m.fracture_toughness = *fracture_toughness;
  if (bulk_modulus)
    m.bulk_modulus = *bulk_modulus;
  m.validate();
  return m;
}

CollarCondition CollarSpec::condition() const {
  switch (kind) {
  case CollarKind::FixedDisplacement:
    return CollarCondition::fixed_displacement(region, x, y, value);
  case CollarKind::PrescribedVelocity:
    return CollarCondition::prescribed_velocity(region, x, y, value);
  case CollarKind::FixedVelocityZero:
    break;
  }
  return CollarCondition::fixed_velocity_zero(region, x, y);
}

// ---------------------------------------------------------------------------
// ScenarioConfig

Rect ScenarioConfig::grid_box() const {
  return {material_box.x0 - pad, material_box.x1 + pad, material_box.y0 - pad,
          material_box.y1 + pad};
}

DomainSpec ScenarioConfig::domain() const {
  DomainSpec d{grid_box(), {}};
  for (const auto &c : cracks)
    d.cracks.push_back(c.segment);
  return d;
}

TimePlan ScenarioConfig::time_plan() const {
  return {dt, final_time, output.snapshot_stride, output.diagnostic_stride};
}

namespace {

// Length of the part of segment [a, b] inside the box (Liang-Barsky).
double clipped_length(const Segment &s, const Rect &box) {
  const Vec2 d = s.b - s.a;
  double t0 = 0.0;
  double t1 = 1.0;
  const double p[] = {-d.x, d.x, -d.y, d.y};
  const double q[] = {s.a.x - box.x0, box.x1 - s.a.x, s.a.y - box.y0, box.y1 - s.a.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0)
        return 0.0;
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0)
      t0 = std::max(t0, r);
    else
      t1 = std::min(t1, r);
  }
  return t1 > t0 ? (t1 - t0) * norm(d) : 0.0;
}

bool intersects(const Rect &a, const Rect &b, double tol) {
  return a.x1 >= b.x0 - tol && a.x0 <= b.x1 + tol && a.y1 >= b.y0 - tol && a.y0 <= b.y1 + tol;
}

} // namespace

std::vector<CrackTip> ScenarioConfig::crack_tips() const {
  std::vector<CrackTip> tips;
  for (const auto &c : cracks) {
    const Vec2 d = c.segment.b - c.segment.a;
    tips.push_back({c.segment.b, (1.0 / norm(d)) * d, clipped_length(c.segment, material_box),
                    c.band});
  }
  return tips;
}

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char *key) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("missing or non-positive ") + key);
  };
  positive(material_box.width(), "[domain] x1 - x0");
  positive(material_box.height(), "[domain] y1 - y0");
  if (!(pad >= 0.0) || !std::isfinite(pad))
    throw ConfigError("[domain] pad must be non-negative");
  positive(horizon, "[discretization] horizon");
  positive(h, "[discretization] h");
  positive(dt, "[time] dt");
  if (!(final_time >= 0.0) || !std::isfinite(final_time))
    throw ConfigError("[time] final_time must be non-negative");
  if (output.diagnostic_stride == 0)
    throw ConfigError("[output] diagnostic_stride must be >= 1");
  const Rect box = grid_box();
  const double tol = 1e-9 * h;
  for (const auto &c : cracks)
    if (norm(c.segment.b - c.segment.a) == 0.0)
      throw ConfigError("[crack] segment has zero length");
  for (const auto &c : collars) {
    if (!c.x && !c.y)
      throw ConfigError("[collar] constrains no component");
    if (!intersects(c.region, box, tol))
      throw ConfigError("[collar] region lies outside the domain");
  }
  if (load.kind == LoadSpec::Kind::RampLine) {
    if (norm(load.b - load.a) == 0.0)
      throw ConfigError("[load] ramp line has zero length");
    if (!box.contains(load.a, tol) || !box.contains(load.b, tol))
      throw ConfigError("[load] ramp line lies outside the domain");
  }
  if (initial.kind == InitialSpec::Kind::Bump)
    positive(initial.sigma, "[initial] sigma");
  if ((load.kind == LoadSpec::Kind::Manufactured || initial.kind == InitialSpec::Kind::Manufactured) &&
      !std::isfinite(manufactured.omega))
    throw ConfigError("[manufactured] omega must be finite");
  (void)material.build(horizon);
}

// ---------------------------------------------------------------------------
// Instantiation

namespace {

BodyForce ramp_line_force(const Grid &grid, const LoadSpec &load) {
  const Vec2 d = load.b - load.a;
  const double len = norm(d);
  const Vec2 e = (1.0 / len) * d;
  const double tol = grid.tolerance();
  std::vector<std::size_t> nodes;
  std::vector<double> profile;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2 rel = grid.coord(i) - load.a;
    const double s = dot(rel, e) / len;
    if (std::abs(cross(e, rel)) > 0.5 * grid.h() - tol || s < -tol / len || s > 1.0 + tol / len)
      continue;
    nodes.push_back(i);
    profile.push_back(std::max(0.0, 1.0 - 2.0 * std::abs(s - 0.5)));
  }
  const double f_max = load.f_max;
  const Vec2 dir = (1.0 / norm(load.direction)) * load.direction;
  return [nodes, profile, f_max, dir](double t, std::span<Vec2> b) {
    std::fill(b.begin(), b.end(), Vec2{});
    for (std::size_t k = 0; k < nodes.size(); ++k)
      b[nodes[k]] = (f_max * t * profile[k]) * dir;
  };
}

} // namespace

Scenario instantiate(const ScenarioConfig &config) {
  config.validate();
  Scenario s;
  s.config = config;
  const MaterialModel material = config.material.build(config.horizon);
  s.disc = Discretization::build(config.domain(), config.h, config.horizon, config.weight_mode);
  s.op = std::make_shared<const NonlocalOperator>(s.disc, material);
  const Grid &grid = s.disc->grid;

  std::vector<CollarCondition> conditions;
  for (const auto &c : config.collars)
    conditions.push_back(c.condition());
  s.collars = CollarSet(grid, std::move(conditions));

  const ManufacturedSolution solution =
      smooth_manufactured(config.material_box, config.manufactured.amplitude,
                          config.manufactured.omega);
  switch (config.load.kind) {
  case LoadSpec::Kind::None:
    break;
  case LoadSpec::Kind::Constant: {
    const Vec2 value = config.load.value;
    s.body = [value](double, std::span<Vec2> b) { std::fill(b.begin(), b.end(), value); };
    break;
  }
  case LoadSpec::Kind::RampLine:
    s.body = ramp_line_force(grid, config.load);
    break;
  case LoadSpec::Kind::Manufactured:
    s.body = manufactured_body_force(s.op, solution);
    break;
  }

  switch (config.initial.kind) {
  case InitialSpec::Kind::Zero:
    s.initial = FieldState::zeros(grid.size());
    break;
  case InitialSpec::Kind::Bump: {
    s.initial = FieldState::zeros(grid.size());
    const auto &ic = config.initial;
    const Vec2 dir = (1.0 / norm(ic.direction)) * ic.direction;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r2 = norm2(grid.coord(i) - ic.center);
      s.initial.u[i] = (ic.amplitude * std::exp(-r2 / (2.0 * ic.sigma * ic.sigma))) * dir;
    }
    break;
  }
  case InitialSpec::Kind::Manufactured:
    s.initial = manufactured_initial_state(grid, solution);
    break;
  }
  s.tips = config.crack_tips();
  s.plan = config.time_plan();
  return s;
}

// ---------------------------------------------------------------------------
// Presets

ScenarioConfig crack_scenario(int horizon_mm, int ratio) {
  if (horizon_mm != 8 && horizon_mm != 4 && horizon_mm != 2 && horizon_mm != 1)
    throw ConfigError("crack preset horizon must be 8, 4, 2 or 1 mm");
  if (ratio != 2 && ratio != 4 && ratio != 8)
    throw ConfigError("crack preset ratio must be 2, 4 or 8");
  ScenarioConfig c;
  const double eps = horizon_mm * 1e-3;
  c.name = "crack_eps" + std::to_string(horizon_mm) + "_h" + std::to_string(ratio);
  c.material.preset = "nu0245";
  c.material_box = {0.0, 0.1, 0.0, 0.1};
  // The lattice covers the body plus a collar layer of thickness eps on every
  // side; top and bottom layers carry the boundary conditions.
  c.pad = eps;
  c.horizon = eps;
  c.h = eps / ratio;
  c.dt = 4e-9;
  c.final_time = 3.4e-5;
  // Initial crack of length 0.02 at x = 0.05, starting in the bottom layer.
  c.cracks.push_back({{{0.05, -eps}, {0.05, 0.02}}});
  const double gap = 1e-6;
  c.collars.push_back({{-eps, 0.05 - gap, -eps, -gap}, true, false,
                       CollarKind::PrescribedVelocity, {-1.0, 0.0}});
  c.collars.push_back({{0.05 - gap, 0.1 + eps, -eps, -gap}, true, false,
                       CollarKind::PrescribedVelocity, {1.0, 0.0}});
  c.collars.push_back({{-eps, 0.1 + eps, 0.1 + gap, 0.1 + eps}, true, false,
                       CollarKind::FixedDisplacement, {0.0, 0.0}});
  c.output.directory = "out/" + c.name;
  c.output.diagnostic_stride = 25;
  c.study.h = {eps / 2, eps / 4, eps / 8};
  c.study.times = {5e-6, 1e-5};
  return c;
}

ScenarioConfig bending_scenario(const std::string &cracks) {
  ScenarioConfig c;
  const double eps = 0.01;
  c.name = "bending_" + cracks;
  c.material.preset = "nu022";
  c.material_box = {0.0, 0.25, 0.0, 0.05};
  c.horizon = eps;
  c.h = eps / 4;
  c.dt = 1.4e-9;
  c.final_time = 3.5e-4;
  const double len = 0.015;
  if (cracks == "single") {
    c.cracks.push_back({{{0.125, 0.0}, {0.125, len}}});
  } else if (cracks == "double") {
    c.cracks.push_back({{{0.105, 0.0}, {0.105, len}}, 0.02});
    c.cracks.push_back({{{0.145, 0.0}, {0.145, len}}, 0.02});
  } else {
    throw ConfigError("bending preset must be 'single' or 'double'");
  }
  // Supports of width 2 eps centered 0.02 m from the bottom corners.
  c.collars.push_back({{0.01, 0.03, 0.0, eps}, false, true, CollarKind::FixedDisplacement, {}});
  c.collars.push_back({{0.22, 0.24, 0.0, eps}, false, true, CollarKind::FixedDisplacement, {}});
  c.load.kind = LoadSpec::Kind::RampLine;
  c.load.a = {0.115, 0.05};
  c.load.b = {0.135, 0.05};
  c.load.f_max = -1.0e13;
  c.load.direction = {0.0, 1.0};
  c.output.directory = "out/" + c.name;
  c.output.diagnostic_stride = 100;
  return c;
}

ScenarioConfig relaxation_scenario() {
  ScenarioConfig c;
  c.name = "relaxation";
  c.material.preset = "nu0245";
  c.material_box = {0.0, 0.1, 0.0, 0.1};
  c.horizon = 0.008;
  c.h = 0.002;
  c.dt = 4e-9;
  c.final_time = 4e-5;
  c.initial.kind = InitialSpec::Kind::Bump;
  c.initial.amplitude = 1e-6;
  c.initial.center = {0.05, 0.05};
  c.initial.sigma = 0.01;
  c.initial.direction = {1.0, 0.0};
  c.output.directory = "out/relaxation";
  c.output.diagnostic_stride = 10;
  return c;
}

ScenarioConfig manufactured_scenario() {
  ScenarioConfig c;
  c.name = "manufactured";
  c.material.preset = "nu0245";
  c.material_box = {0.0, 0.05, 0.0, 0.05};
  c.horizon = 0.008;
  c.h = 0.002;
  c.dt = 4e-9;
  c.final_time = 2e-6;
  c.manufactured.amplitude = 1e-6;
  // 5 us period: T = 2 us must not hit a zero of the acceleration, where the
  // first-order error term of the scheme cancels.
  c.manufactured.omega = 2.0 * std::numbers::pi * 2.0e5;
  c.load.kind = LoadSpec::Kind::Manufactured;
  c.initial.kind = InitialSpec::Kind::Manufactured;
  c.output.directory = "out/manufactured";
  c.output.diagnostic_stride = 10;
  c.study.h = {0.004, 0.002, 0.001};
  c.study.times = {1e-6, 2e-6};
  c.study.dts = {4e-9, 2e-9, 1e-9};
  c.study.dt_ref = 1.25e-10;
  c.study.final_time = 2e-6;
  return c;
}

std::vector<PresetInfo> preset_list() {
  std::vector<PresetInfo> out;
  for (int eps : {8, 4, 2, 1})
    for (int r : {2, 4, 8})
      out.push_back({"crack_eps" + std::to_string(eps) + "_h" + std::to_string(r),
                     "mode-I crack growth, horizon " + std::to_string(eps) + " mm, h = horizon/" +
                         std::to_string(r)});
  out.push_back({"bending_single", "three-point bending, one notch"});
  out.push_back({"bending_double", "three-point bending, two notches"});
  out.push_back({"relaxation", "free relaxation of a displacement bump"});
  out.push_back({"manufactured", "smooth manufactured solution"});
  return out;
}

ScenarioConfig preset(const std::string &name) {
  if (name.rfind("crack_eps", 0) == 0) {
    const auto pos = name.find("_h", 9);
    if (pos != std::string::npos) {
      try {
        std::size_t used = 0;
        const int eps = std::stoi(name.substr(9, pos - 9), &used);
        if (used != pos - 9)
          throw ConfigError("bad preset");
        const std::string rs = name.substr(pos + 2);
        const int ratio = std::stoi(rs, &used);
        if (used == rs.size())
          return crack_scenario(eps, ratio);
      } catch (const std::logic_error &) {
      } catch (const ConfigError &) {
      }
    }
  }
  if (name == "bending_single")
    return bending_scenario("single");
  if (name == "bending_double")
    return bending_scenario("double");
  if (name == "relaxation")
    return relaxation_scenario();
  if (name == "manufactured")
    return manufactured_scenario();
  throw ConfigError("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Study runner

StudyRunner make_study_runner(const ScenarioConfig &config) {
  return [config](double h, double dt, std::span<const double> times) {
    ScenarioConfig c = config;
    c.h = h;
    c.dt = dt;
    std::vector<std::size_t> targets;
    for (double t : times)
      targets.push_back(static_cast<std::size_t>(std::llround(t / dt)));
    c.final_time = targets.empty() ? 0.0
                                   : static_cast<double>(*std::max_element(targets.begin(),
                                                                           targets.end())) *
                                         dt;
    const Scenario s = instantiate(c);
    Integrator integ(*s.op, s.collars, s.body, dt, s.initial);
    StudyRun run;
    run.disc = s.disc;
    run.states.resize(targets.size());
    const std::size_t last = c.final_time > 0.0 ? static_cast<std::size_t>(std::llround(c.final_time / dt)) : 0;
    for (std::size_t k = 0;; ++k) {
      for (std::size_t m = 0; m < targets.size(); ++m)
        if (targets[m] == k)
          run.states[m] = integ.state();
      if (k == last)
        break;
      integ.advance();
    }
    return run;
  };
}

} // namespace pdfrac
