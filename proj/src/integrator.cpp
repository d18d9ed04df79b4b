#include "pdfrac/integrator.hpp"

#include "pdfrac/errors.hpp"
#include "pdfrac/log.hpp"
#include "pdfrac/parallel.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace pdfrac {

CollarCondition CollarCondition::fixed_displacement(Rect region, bool x, bool y, Vec2 value) {
  return {region, x, y, CollarKind::FixedDisplacement, [value](double) { return value; }};
}

CollarCondition CollarCondition::prescribed_velocity(Rect region, bool x, bool y, Vec2 value) {
  return {region, x, y, CollarKind::PrescribedVelocity, [value](double) { return value; }};
}

CollarCondition CollarCondition::fixed_velocity_zero(Rect region, bool x, bool y) {
  return {region, x, y, CollarKind::FixedVelocityZero, {}};
}

std::size_t TimePlan::steps() const {
  return static_cast<std::size_t>(std::llround(final_time / dt));
}

void TimePlan::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("time step must be positive");
  // T = 0 is accepted and yields a run with only the initial state.
  if (!(final_time >= 0.0) || !std::isfinite(final_time))
    throw ConfigError("final time must be finite and non-negative");
  if (diagnostic_stride == 0)
    throw ConfigError("diagnostic stride must be >= 1");
}

CollarSet::CollarSet(const Grid &grid, std::vector<CollarCondition> collars)
    : collars_(std::move(collars)) {
  const Rect &box = grid.box();
  const double tol = grid.tolerance();
  for (const auto &c : collars_) {
    if (!c.constrain_x && !c.constrain_y)
      throw ConfigError("collar constrains no component");
    if (c.region.x1 < box.x0 - tol || c.region.x0 > box.x1 + tol || c.region.y1 < box.y0 - tol ||
        c.region.y0 > box.y1 + tol)
      throw ConfigError("collar region does not intersect the domain");
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (c.region.contains(grid.coord(i), tol))
        ids.push_back(i);
    if (ids.empty())
      throw ConfigError("collar region contains no grid node");
    nodes_.push_back(std::move(ids));
  }
}

void CollarSet::apply_velocity(std::span<Vec2> v, double t) const {
  for (std::size_t c = 0; c < collars_.size(); ++c) {
    const auto &col = collars_[c];
    if (col.kind == CollarKind::FixedDisplacement)
      continue;
    const Vec2 val = col.kind == CollarKind::PrescribedVelocity ? col.at(t) : Vec2{};
    for (std::size_t i : nodes_[c]) {
      if (col.constrain_x)
        v[i].x = val.x;
      if (col.constrain_y)
        v[i].y = val.y;
    }
  }
}

void CollarSet::apply_displacement(std::span<Vec2> u, std::span<Vec2> v, double t) const {
  for (std::size_t c = 0; c < collars_.size(); ++c) {
    const auto &col = collars_[c];
    if (col.kind != CollarKind::FixedDisplacement)
      continue;
    const Vec2 val = col.at(t);
    for (std::size_t i : nodes_[c]) {
      if (col.constrain_x) {
        u[i].x = val.x;
        v[i].x = 0.0;
      }
      if (col.constrain_y) {
        u[i].y = val.y;
        v[i].y = 0.0;
      }
    }
  }
}

void CollarSet::apply_initial(FieldState &state) const {
  apply_velocity(state.v, state.t);
  apply_displacement(state.u, state.v, state.t);
}

void step(FieldState &state, std::span<const Vec2> force, double density, double dt,
          const CollarSet &collars, std::size_t step_index) {
  const double t_next = static_cast<double>(step_index + 1) * dt;
  const double a = dt / density;
  const auto n = static_cast<long>(state.u.size());
  auto &u = state.u;
  auto &v = state.v;
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    v[i].x += a * force[i].x;
    v[i].y += a * force[i].y;
  }
  collars.apply_velocity(v, t_next);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    u[i].x += dt * v[i].x;
    u[i].y += dt * v[i].y;
  }
  collars.apply_displacement(u, v, t_next);
  state.t = t_next;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i].x) || !std::isfinite(u[i].y) || !std::isfinite(v[i].x) ||
        !std::isfinite(v[i].y))
      throw NumericalError("non-finite state at node " + std::to_string(i) + " in step " +
                               std::to_string(step_index + 1),
                           i, step_index + 1);
}

double stable_dt_estimate(double h, double bulk_modulus, double density) {
  return h / std::sqrt(bulk_modulus / density);
}

Integrator::Integrator(const NonlocalOperator &op, CollarSet collars, BodyForce body, double dt,
                       FieldState initial)
    : op_(op), collars_(std::move(collars)), body_(std::move(body)), dt_(dt),
      state_(std::move(initial)), force_(op.size()), theta_(op.size()) {
  if (!(dt_ > 0.0))
    throw DomainError("time step must be positive");
  if (state_.u.size() != op.size() || state_.v.size() != op.size())
    throw DomainError("initial state size does not match the grid");
  k_ = static_cast<std::size_t>(std::llround(state_.t / dt_));
  collars_.apply_initial(state_);
}

void Integrator::advance() {
  try {
    op_.assemble(state_.u, state_.t, body_ ? &body_ : nullptr, force_, theta_);
  } catch (const NumericalError &e) {
    throw NumericalError(std::string(e.what()) + " in step " + std::to_string(k_ + 1), e.node(),
                         k_ + 1);
  }
  step(state_, force_, op_.material().density, dt_, collars_, k_);
  ++k_;
}

void Integrator::advance(std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s)
    advance();
}

RunSummary run(Integrator &integrator, const TimePlan &plan, const StepObserver &observer) {
  plan.validate();
  if (plan.dt != integrator.dt())
    throw DomainError("time plan and integrator use different time steps");
  const double h = integrator.op().grid().h();
  const auto &m = integrator.op().material();
  const double dt_est = stable_dt_estimate(h, m.bulk_modulus, m.density);
  if (plan.dt > dt_est) {
    std::ostringstream msg;
    msg << "time step " << plan.dt << " s exceeds the heuristic stable step " << dt_est << " s";
    warn(msg.str());
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t k_total = plan.steps();
  if (observer)
    observer(integrator.step_index(), integrator.state());
  for (std::size_t s = 0; s < k_total; ++s) {
    integrator.advance();
    if (observer)
      observer(integrator.step_index(), integrator.state());
  }
  const auto stop = std::chrono::steady_clock::now();
  return {k_total, std::chrono::duration<double>(stop - start).count()};
}

} // namespace pdfrac
