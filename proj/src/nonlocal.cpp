#include "pdfrac/nonlocal.hpp"

#include "pdfrac/errors.hpp"
#include "pdfrac/parallel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pdfrac {

std::shared_ptr<const Discretization> Discretization::build(const DomainSpec &spec, double h,
                                                            double horizon,
                                                            BoundaryWeightMode mode) {
  Grid grid = build_grid(spec, h, horizon);
  NeighborTable bonds = build_neighbors(grid, horizon, spec.cracks);
  std::vector<double> weight = boundary_weight(grid, spec, mode, horizon);
  return std::make_shared<const Discretization>(
      Discretization{spec, std::move(grid), std::move(bonds), std::move(weight)});
}

NonlocalOperator::NonlocalOperator(std::shared_ptr<const Discretization> disc,
                                   MaterialModel material)
    : disc_(std::move(disc)), material_(std::move(material)), eps_(material_.horizon) {
  material_.validate();
  const auto &t = disc_->bonds;
  const auto &g = disc_->grid;
  const double norm_factor =
      1.0 / (std::pow(eps_, material_.dimension) * unit_ball_volume(material_.dimension));
  bond_weight_.resize(t.bonds());
  inv_sqrt_length_.resize(t.bonds());
  for (std::size_t i = 0; i < t.nodes(); ++i)
    for (std::size_t b = t.begin(i); b < t.end(i); ++b) {
      const double d = t.distance[b];
      bond_weight_[b] = material_.influence(d / eps_) * g.volume(t.neighbor[b]) *
                        t.volume_fraction[b] * norm_factor;
      inv_sqrt_length_[b] = 1.0 / std::sqrt(d);
    }
}

double NonlocalOperator::hydrostatic_strain(std::span<const Vec2> u, std::size_t i) const {
  const auto &t = disc_->bonds;
  const auto &w = disc_->weight;
  double theta = 0.0;
  for (std::size_t b = t.begin(i); b < t.end(i); ++b) {
    if (!t.visible[b])
      continue;
    const std::size_t j = t.neighbor[b];
    // S_ij * |x_j - x_i| = (u_j - u_i) . e_ij
    theta += w[j] * bond_weight_[b] * dot(u[j] - u[i], t.direction[b]);
  }
  return theta;
}

void NonlocalOperator::hydrostatic_strains(std::span<const Vec2> u, std::span<double> theta) const {
  const auto n = static_cast<long>(size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long i = 0; i < n; ++i)
    theta[static_cast<std::size_t>(i)] = hydrostatic_strain(u, static_cast<std::size_t>(i));
}

Vec2 NonlocalOperator::tensile_force(std::span<const Vec2> u, std::size_t i) const {
  const auto &t = disc_->bonds;
  const auto &w = disc_->weight;
  const auto &f = material_.tensile;
  Vec2 force;
  if (w[i] == 0.0)
    return force;
  for (std::size_t b = t.begin(i); b < t.end(i); ++b) {
    if (!t.visible[b])
      continue;
    const std::size_t j = t.neighbor[b];
    const Vec2 &e = t.direction[b];
    // f'(sqrt(|xi|) S) with sqrt(|xi|) S = (u_j - u_i) . e / sqrt(|xi|);
    // the chain-rule factor sqrt(|xi|) combines with 1/|xi| into 1/sqrt(|xi|).
    const double r = dot(u[j] - u[i], e) * inv_sqrt_length_[b];
    const double s = w[j] * bond_weight_[b] * f.first(r) * inv_sqrt_length_[b];
    force.x += s * e.x;
    force.y += s * e.y;
  }
  const double scale = 2.0 * w[i] / eps_;
  return {scale * force.x, scale * force.y};
}

Vec2 NonlocalOperator::dilatational_force(std::span<const Vec2> /*u*/,
                                          std::span<const double> theta, std::size_t i) const {
  const auto &t = disc_->bonds;
  const auto &w = disc_->weight;
  const auto &g = material_.dilatational;
  Vec2 force;
  if (w[i] == 0.0)
    return force;
  const double gi = g.first(theta[i]);
  for (std::size_t b = t.begin(i); b < t.end(i); ++b) {
    if (!t.visible[b])
      continue;
    const std::size_t j = t.neighbor[b];
    const Vec2 &e = t.direction[b];
    const double s = w[j] * bond_weight_[b] * (g.first(theta[j]) + gi);
    force.x += s * e.x;
    force.y += s * e.y;
  }
  const double scale = w[i] / (eps_ * eps_);
  return {scale * force.x, scale * force.y};
}

void NonlocalOperator::assemble(std::span<const Vec2> u, double t, const BodyForce *body,
                                std::span<Vec2> force, std::span<double> theta) const {
  const auto n = static_cast<long>(size());
  hydrostatic_strains(u, theta);
  if (body && *body)
    (*body)(t, force);
  else
    std::fill(force.begin(), force.end(), Vec2{});
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const Vec2 ft = tensile_force(u, i);
    const Vec2 fd = dilatational_force(u, theta, i);
    force[i] = Vec2{ft.x + fd.x + force[i].x, ft.y + fd.y + force[i].y};
  }
  for (std::size_t i = 0; i < force.size(); ++i)
    if (!std::isfinite(force[i].x) || !std::isfinite(force[i].y))
      throw NumericalError("non-finite force at node " + std::to_string(i), i, 0);
}

std::vector<Vec2> NonlocalOperator::assemble(std::span<const Vec2> u, double t,
                                             const BodyForce *body) const {
  std::vector<Vec2> force(size());
  std::vector<double> theta(size());
  assemble(u, t, body, force, theta);
  return force;
}

double NonlocalOperator::bond_energy_density(std::span<const Vec2> u, std::size_t i) const {
  const auto &t = disc_->bonds;
  const auto &w = disc_->weight;
  const auto &f = material_.tensile;
  if (w[i] == 0.0)
    return 0.0;
  double sum = 0.0;
  for (std::size_t b = t.begin(i); b < t.end(i); ++b) {
    if (!t.visible[b])
      continue;
    const std::size_t j = t.neighbor[b];
    const double r = dot(u[j] - u[i], t.direction[b]) * inv_sqrt_length_[b];
    sum += w[j] * bond_weight_[b] * f.value(r);
  }
  return w[i] * sum / eps_;
}

double NonlocalOperator::dilatational_energy_density(double theta, std::size_t i) const {
  return disc_->weight[i] * material_.dilatational.value(theta) / (eps_ * eps_);
}

double NonlocalOperator::damage(std::span<const Vec2> u, std::size_t i) const {
  const auto &t = disc_->bonds;
  const double rbar = material_.tensile.inflection();
  double z = -std::numeric_limits<double>::infinity();
  for (std::size_t b = t.begin(i); b < t.end(i); ++b) {
    if (!t.visible[b])
      continue;
    // S / S_c = S sqrt(|xi|) / r_bar
    const double r = dot(u[t.neighbor[b]] - u[i], t.direction[b]) * inv_sqrt_length_[b];
    z = std::max(z, r / rbar);
  }
  return std::isfinite(z) ? z : 0.0;
}

void NonlocalOperator::damage_field(std::span<const Vec2> u, std::span<double> z) const {
  const auto n = static_cast<long>(size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] = damage(u, static_cast<std::size_t>(i));
}

} // namespace pdfrac
