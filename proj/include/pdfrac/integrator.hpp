#pragma once

#include "pdfrac/geometry.hpp"
#include "pdfrac/nonlocal.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pdfrac {

enum class CollarKind { FixedDisplacement, PrescribedVelocity, FixedVelocityZero };

/// Dirichlet-type condition on every node inside an axis-aligned region.
struct CollarCondition {
  Rect region;
  bool constrain_x = true;
  bool constrain_y = true;
  CollarKind kind = CollarKind::FixedVelocityZero;
  /// Prescribed displacement or velocity as a function of time; unused for
  /// FixedVelocityZero. Defaults to zero when empty.
  std::function<Vec2(double)> value;

  static CollarCondition fixed_displacement(Rect region, bool x, bool y, Vec2 value = {});
  static CollarCondition prescribed_velocity(Rect region, bool x, bool y, Vec2 value);
  static CollarCondition fixed_velocity_zero(Rect region, bool x, bool y);

  Vec2 at(double t) const { return value ? value(t) : Vec2{}; }
};

struct TimePlan {
  double dt = 0.0;
  double final_time = 0.0;
  std::size_t snapshot_stride = 0; // 0 disables snapshots
  std::size_t diagnostic_stride = 1;

  /// K = round(T / dt).
  std::size_t steps() const;
  void validate() const;
};

/// Collars resolved to node lists on a concrete grid.
class CollarSet {
public:
  CollarSet() = default;
  /// Throws ConfigError when a region misses the domain, selects no node or
  /// constrains no component.
  CollarSet(const Grid &grid, std::vector<CollarCondition> collars);

  const std::vector<CollarCondition> &conditions() const { return collars_; }
  const std::vector<std::size_t> &nodes(std::size_t collar) const { return nodes_[collar]; }
  bool empty() const { return collars_.empty(); }

  /// Applies velocity collars to v (before u is advanced).
  void apply_velocity(std::span<Vec2> v, double t) const;
  /// Applies displacement collars to u and zeroes the constrained v.
  void apply_displacement(std::span<Vec2> u, std::span<Vec2> v, double t) const;
  /// Imposes all collars on the initial state without advancing u.
  void apply_initial(FieldState &state) const;

private:
  std::vector<CollarCondition> collars_;
  std::vector<std::vector<std::size_t>> nodes_;
};

/// One explicit step:
///   v <- v + dt (force) / rho, velocity collars,
///   u <- u + dt v, displacement collars.
/// `force` must hold L(u^k) + b^k. Throws NumericalError on non-finite output.
void step(FieldState &state, std::span<const Vec2> force, double density, double dt,
          const CollarSet &collars, std::size_t step_index);

/// Heuristic stable step h / sqrt(K / rho).
double stable_dt_estimate(double h, double bulk_modulus, double density);

/// Time loop driver. Holds the operator, body force and collars; owns the
/// state and scratch buffers.
class Integrator {
public:
  Integrator(const NonlocalOperator &op, CollarSet collars, BodyForce body, double dt,
             FieldState initial);

  const FieldState &state() const { return state_; }
  FieldState &state() { return state_; }
  std::size_t step_index() const { return k_; }
  double dt() const { return dt_; }
  const NonlocalOperator &op() const { return op_; }
  const BodyForce &body() const { return body_; }
  const CollarSet &collars() const { return collars_; }

  /// Advances one step; time after the step is (k + 1) dt exactly.
  void advance();
  void advance(std::size_t steps);

private:
  const NonlocalOperator &op_;
  CollarSet collars_;
  BodyForce body_;
  double dt_;
  FieldState state_;
  std::size_t k_ = 0;
  std::vector<Vec2> force_;
  std::vector<double> theta_;
};

struct RunSummary {
  std::size_t steps = 0;
  double wall_seconds = 0.0;
};

/// Called with the step index and state; invoked at k = 0 and after every
/// step.
using StepObserver = std::function<void(std::size_t, const FieldState &)>;

/// Runs K = plan.steps() steps, warning when dt exceeds the heuristic
/// stable step.
RunSummary run(Integrator &integrator, const TimePlan &plan, const StepObserver &observer);

} // namespace pdfrac
