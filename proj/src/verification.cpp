#include "pdfrac/verification.hpp"

#include "pdfrac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace pdfrac {

namespace {

using ld = long double;

struct PairGeometry {
  bool in = false;
  ld dist = 0;
  ld ex = 0;
  ld ey = 0;
  ld weight = 0; // J(d/eps) V_j Vbar / (eps^d omega_d)
};

void check_limit(const Discretization &disc) {
  if (disc.grid.size() > kBruteForceLimit)
    throw UnsupportedConfiguration("brute-force oracle limited to " +
                                   std::to_string(kBruteForceLimit) + " nodes");
}

PairGeometry pair_geometry(const Discretization &disc, const MaterialModel &m, std::size_t i,
                           std::size_t j) {
  PairGeometry p;
  if (i == j)
    return p;
  const Grid &g = disc.grid;
  const ld eps = m.horizon;
  const ld h = g.h();
  const ld dx = static_cast<ld>(g.coord(j).x) - g.coord(i).x;
  const ld dy = static_cast<ld>(g.coord(j).y) - g.coord(i).y;
  const ld dist = std::sqrt(dx * dx + dy * dy);
  if (dist > eps + h / 2)
    return p;
  for (const auto &crack : disc.spec.cracks)
    if (bond_crosses_crack(g.coord(i), g.coord(j), crack, g.tolerance()))
      return p;
  ld vbar = 1;
  if (dist > eps - h / 2)
    vbar = (eps + h / 2 - dist) / h;
  p.in = true;
  p.dist = dist;
  p.ex = dx / dist;
  p.ey = dy / dist;
  p.weight = static_cast<ld>(m.influence(static_cast<double>(dist / eps))) * g.volume(j) * vbar /
             (std::pow(eps, static_cast<ld>(m.dimension)) * unit_ball_volume(m.dimension));
  return p;
}

ld projected(std::span<const Vec2> u, std::size_t i, std::size_t j, const PairGeometry &p) {
  return (static_cast<ld>(u[j].x) - u[i].x) * p.ex + (static_cast<ld>(u[j].y) - u[i].y) * p.ey;
}

} // namespace

std::vector<double> brute_force_theta(const Discretization &disc, const MaterialModel &m,
                                      std::span<const Vec2> u) {
  check_limit(disc);
  const std::size_t n = disc.grid.size();
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    ld sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const PairGeometry p = pair_geometry(disc, m, i, j);
      if (p.in)
        sum += disc.weight[j] * p.weight * projected(u, i, j, p);
    }
    theta[i] = static_cast<double>(sum);
  }
  return theta;
}

std::vector<Vec2> brute_force_force(const Discretization &disc, const MaterialModel &m,
                                    std::span<const Vec2> u) {
  const auto theta = brute_force_theta(disc, m, u);
  const std::size_t n = disc.grid.size();
  const ld eps = m.horizon;
  std::vector<Vec2> force(n);
  for (std::size_t i = 0; i < n; ++i) {
    ld fx = 0;
    ld fy = 0;
    const ld wi = disc.weight[i];
    for (std::size_t j = 0; j < n; ++j) {
      const PairGeometry p = pair_geometry(disc, m, i, j);
      if (!p.in)
        continue;
      const ld sq = std::sqrt(p.dist);
      const ld r = projected(u, i, j, p) / sq;
      const ld tensile =
          2 / eps * m.tensile.first(static_cast<double>(r)) / sq;
      const ld dil = (static_cast<ld>(m.dilatational.first(theta[j])) +
                      m.dilatational.first(theta[i])) /
                     (eps * eps);
      const ld s = wi * disc.weight[j] * p.weight * (tensile + dil);
      fx += s * p.ex;
      fy += s * p.ey;
    }
    force[i] = {static_cast<double>(fx), static_cast<double>(fy)};
  }
  return force;
}

double brute_force_potential_energy(const Discretization &disc, const MaterialModel &m,
                                    std::span<const Vec2> u) {
  const auto theta = brute_force_theta(disc, m, u);
  const std::size_t n = disc.grid.size();
  const ld eps = m.horizon;
  ld total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ld bond = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const PairGeometry p = pair_geometry(disc, m, i, j);
      if (p.in)
        bond += disc.weight[j] * p.weight *
                m.tensile.value(static_cast<double>(projected(u, i, j, p) / std::sqrt(p.dist)));
    }
    const ld wi = disc.weight[i];
    total += (wi * bond / eps + wi * m.dilatational.value(theta[i]) / (eps * eps)) *
             disc.grid.volume(i);
  }
  return static_cast<double>(total);
}

double max_relative_difference(std::span<const Vec2> a, std::span<const Vec2> b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, norm(a[i] - b[i]));
    scale = std::max(scale, norm(b[i]));
  }
  if (scale == 0.0)
    return diff == 0.0 ? 0.0 : INFINITY;
  return diff / scale;
}

std::vector<Vec2> random_field(std::size_t n, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  std::vector<Vec2> out(n);
  for (auto &p : out) {
    p.x = dist(rng);
    p.y = dist(rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manufactured solutions

ManufacturedSolution smooth_manufactured(const Rect &box, double amplitude, double omega) {
  const double kx = std::numbers::pi / box.width();
  const double ky = std::numbers::pi / box.height();
  auto shape = [=](const Vec2 &x) {
    return amplitude * std::sin(kx * (x.x - box.x0)) * std::sin(ky * (x.y - box.y0));
  };
  ManufacturedSolution s;
  s.u = [=](const Vec2 &x, double t) {
    const double a = shape(x) * std::sin(omega * t);
    return Vec2{a, a};
  };
  s.v = [=](const Vec2 &x, double t) {
    const double a = shape(x) * omega * std::cos(omega * t);
    return Vec2{a, a};
  };
  s.a = [=](const Vec2 &x, double t) {
    const double a = -shape(x) * omega * omega * std::sin(omega * t);
    return Vec2{a, a};
  };
  return s;
}

BodyForce manufactured_body_force(std::shared_ptr<const NonlocalOperator> op,
                                  ManufacturedSolution solution) {
  return [op, solution](double t, std::span<Vec2> b) {
    const Grid &g = op->grid();
    const double rho = op->material().density;
    std::vector<Vec2> u(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      u[i] = solution.u(g.coord(i), t);
    const auto force = op->assemble(u, t, nullptr);
    for (std::size_t i = 0; i < g.size(); ++i)
      b[i] = rho * solution.a(g.coord(i), t) - force[i];
  };
}

FieldState manufactured_initial_state(const Grid &grid, const ManufacturedSolution &solution) {
  FieldState s = FieldState::zeros(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s.u[i] = solution.u(grid.coord(i), 0.0);
    s.v[i] = solution.v(grid.coord(i), 0.0);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Studies

double state_difference(const FieldState &a, const Grid &ga, const FieldState &b,
                        const Grid &gb) {
  return l2_difference(std::span<const Vec2>(a.u), ga, std::span<const Vec2>(b.u), gb) +
         l2_difference(std::span<const Vec2>(a.v), ga, std::span<const Vec2>(b.v), gb);
}

SpatialStudy spatial_convergence_study(const StudyRunner &runner, double horizon,
                                       std::span<const double> h, double dt,
                                       std::span<const double> times) {
  if (h.size() != 3)
    throw DomainError("spatial study needs exactly three mesh levels");
  for (std::size_t k = 0; k + 1 < h.size(); ++k)
    if (std::abs(h[k] / h[k + 1] - 2.0) > 1e-9)
      throw UnsupportedConfiguration("spatial study needs mesh ratio 2 between levels");
  SpatialStudy study;
  std::vector<StudyRun> runs;
  for (double hk : h) {
    runs.push_back(runner(hk, dt, times));
    study.h.push_back(hk);
    study.nodes.push_back(runs.back().disc->grid.size());
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    SpatialRow row;
    row.horizon = horizon;
    row.t = runs[0].states[k].t;
    row.e12 = state_difference(runs[0].states[k], runs[0].disc->grid, runs[1].states[k],
                               runs[1].disc->grid);
    row.e23 = state_difference(runs[1].states[k], runs[1].disc->grid, runs[2].states[k],
                               runs[2].disc->grid);
    if (row.e12 > 0.0 && row.e23 > 0.0) {
      row.rate = convergence_rate(row.e12, row.e23, h[0] / h[1]);
      row.rate_defined = true;
    }
    study.rows.push_back(row);
  }
  return study;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("log-log fit needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0))
      throw DomainError("log-log fit needs positive data");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

TemporalStudy temporal_convergence_study(const StudyRunner &runner, double h,
                                         std::span<const double> dts, double dt_ref,
                                         double final_time) {
  if (dts.empty())
    throw DomainError("temporal study needs at least one time step");
  if (!(dt_ref > 0.0) || dt_ref > *std::min_element(dts.begin(), dts.end()) / 8.0 * (1 + 1e-12))
    throw DomainError("reference time step must be at most min(dt) / 8");
  const double times[] = {final_time};
  const StudyRun ref = runner(h, dt_ref, times);
  TemporalStudy study;
  std::vector<double> xs;
  std::vector<double> ys;
  for (double dt : dts) {
    const StudyRun run = runner(h, dt, times);
    TemporalRow row;
    row.dt = dt;
    row.error = state_difference(run.states[0], run.disc->grid, ref.states[0], ref.disc->grid);
    if (!study.rows.empty() && row.error > 0.0 && study.rows.back().error > 0.0)
      row.order = std::log(study.rows.back().error / row.error) /
                  std::log(study.rows.back().dt / row.dt);
    if (row.error > 0.0) {
      xs.push_back(dt);
      ys.push_back(row.error);
    }
    study.rows.push_back(row);
  }
  if (xs.size() >= 2 && xs.size() == dts.size()) {
    study.fitted_order = log_log_slope(xs, ys);
    study.order_defined = true;
  }
  return study;
}

// ---------------------------------------------------------------------------
// Projection error

double ProjectionField::operator()(double x) const {
  switch (kind) {
  case Kind::Constant:
    return constant;
  case Kind::Linear:
    return x;
  case Kind::Weierstrass: {
    double s = 0.0;
    for (int k = 0; k < terms; ++k)
      s += std::pow(2.0, -k * gamma) * std::cos(std::ldexp(std::numbers::pi, k) * x);
    return s;
  }
  }
  return 0.0;
}

double ProjectionField::integral(double a, double b) const {
  switch (kind) {
  case Kind::Constant:
    return constant * (b - a);
  case Kind::Linear:
    return 0.5 * (b * b - a * a);
  case Kind::Weierstrass: {
    double s = 0.0;
    for (int k = 0; k < terms; ++k) {
      const double w = std::ldexp(std::numbers::pi, k);
      s += std::pow(2.0, -k * gamma) * (std::sin(w * b) - std::sin(w * a)) / w;
    }
    return s;
  }
  }
  return 0.0;
}

double ProjectionField::square_integral() const {
  switch (kind) {
  case Kind::Constant:
    return constant * constant;
  case Kind::Linear:
    return 1.0 / 3.0;
  case Kind::Weierstrass: {
    // cos(2^k pi x) are orthogonal on [0, 1] with squared norm 1/2.
    double s = 0.0;
    for (int k = 0; k < terms; ++k)
      s += 0.5 * std::pow(2.0, -2.0 * k * gamma);
    return s;
  }
  }
  return 0.0;
}

double ProjectionField::seminorm() const {
  switch (kind) {
  case Kind::Constant:
    return 0.0;
  case Kind::Linear:
    return 1.0;
  case Kind::Weierstrass: {
    double sup = 0.0;
    constexpr int samples = 1024;
    for (int s = 0; s <= samples; ++s) {
      const double x = static_cast<double>(s) / samples;
      for (int j = 0; j < 60; ++j) {
        const double delta = std::pow(2.0, -0.5 * j);
        const double y = x + delta;
        if (y > 1.0)
          continue;
        sup = std::max(sup, std::abs((*this)(y) - (*this)(x)) / std::pow(delta, gamma));
      }
    }
    return sup;
  }
  }
  return 0.0;
}

double projection_error(const ProjectionField &field, double h) {
  const Grid grid(Rect{0.0, 1.0, 0.0, 1.0}, h);
  const auto &xb = grid.x_breaks();
  // ||P u - u||^2 = int u^2 - sum_cells (int_cell u)^2 / |cell| (height 1).
  double projected = 0.0;
  for (std::size_t k = 0; k + 1 < xb.size(); ++k) {
    const double w = xb[k + 1] - xb[k];
    const double m = field.integral(xb[k], xb[k + 1]);
    projected += m * m / w;
  }
  return std::sqrt(std::max(0.0, field.square_integral() - projected));
}

ProjectionReport projection_error_suite(std::span<const double> gammas, std::span<const double> h,
                                        double exponent_tolerance) {
  ProjectionReport report;
  for (double gamma : gammas) {
    ProjectionField field;
    if (gamma == 1.0) {
      field.kind = ProjectionField::Kind::Linear;
    } else {
      field.kind = ProjectionField::Kind::Weierstrass;
      field.gamma = gamma;
    }
    ProjectionCase c;
    c.name = field.kind == ProjectionField::Kind::Linear ? "linear" : "weierstrass";
    c.gamma = gamma;
    const double semi = field.seminorm();
    for (double hk : h) {
      c.h.push_back(hk);
      c.error.push_back(projection_error(field, hk));
      c.bound.push_back(std::pow(std::sqrt(2.0), gamma) * semi * std::pow(hk, gamma));
      c.bound_ok = c.bound_ok && c.error.back() <= c.bound.back();
    }
    if (h.size() >= 2) {
      c.fitted_exponent = log_log_slope(c.h, c.error);
      c.exponent_ok = std::abs(c.fitted_exponent - gamma) <= exponent_tolerance;
    }
    report.ok = report.ok && c.bound_ok && c.exponent_ok;
    report.cases.push_back(std::move(c));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Lipschitz bound

LipschitzReport lipschitz_l2_suite(const MaterialModel &m, int n, double h, int trials,
                                   std::uint64_t seed, BoundaryWeightMode mode) {
  if (n < 2 || n > 32)
    throw DomainError("Lipschitz suite supports grids of 2 to 32 nodes per side");
  const double side = (n - 1) * h;
  DomainSpec spec{Rect{0.0, side, 0.0, side}, {}};
  auto disc = Discretization::build(spec, h, m.horizon, mode);
  const NonlocalOperator op(disc, m);
  LipschitzReport r;
  r.l3 = lipschitz_constant(m);
  const double eps2 = m.horizon * m.horizon;
  const double base = m.tensile.inflection() * std::sqrt(m.horizon);
  constexpr double scales[] = {0.1, 1.0, 10.0};
  std::mt19937_64 seeds(seed);
  for (int trial = 0; trial < trials; ++trial) {
    const double amp = base * scales[trial % 3];
    const auto u = random_field(op.size(), amp, seeds());
    const auto v = random_field(op.size(), amp, seeds());
    const auto lu = op.assemble(u);
    const auto lv = op.assemble(v);
    std::vector<Vec2> dl(op.size());
    std::vector<Vec2> du(op.size());
    for (std::size_t i = 0; i < op.size(); ++i) {
      dl[i] = lu[i] - lv[i];
      du[i] = u[i] - v[i];
    }
    const double lhs = l2_norm(std::span<const Vec2>(dl), op.grid());
    const double rhs = l2_norm(std::span<const Vec2>(du), op.grid());
    const double ratio = rhs > 0.0 ? lhs * eps2 / (r.l3 * rhs) : 0.0;
    r.ratios.push_back(ratio);
    if (ratio > r.max_ratio || trial == 0) {
      r.max_ratio = ratio;
      r.worst_trial = static_cast<std::size_t>(trial);
      r.worst_u = u;
      r.worst_v = v;
    }
  }
  r.ok = r.max_ratio <= 1.0;
  return r;
}

} // namespace pdfrac
