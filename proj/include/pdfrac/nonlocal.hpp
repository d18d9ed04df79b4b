#pragma once

#include "pdfrac/geometry.hpp"
#include "pdfrac/potentials.hpp"
#include "pdfrac/vec2.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace pdfrac {

/// Displacement and velocity at one time level.
struct FieldState {
  double t = 0.0;
  std::vector<Vec2> u;
  std::vector<Vec2> v;

  static FieldState zeros(std::size_t nodes) {
    return {0.0, std::vector<Vec2>(nodes), std::vector<Vec2>(nodes)};
  }
};

/// Fills the body-force density b(x_i, t) for every node.
using BodyForce = std::function<void(double t, std::span<Vec2> b)>;

/// Grid, bonds and boundary weight shared by every kernel of a simulation.
struct Discretization {
  DomainSpec spec;
  Grid grid;
  NeighborTable bonds;
  std::vector<double> weight; // omega at the nodes

  static std::shared_ptr<const Discretization>
  build(const DomainSpec &spec, double h, double horizon,
        BoundaryWeightMode mode = BoundaryWeightMode::Indicator);
};

/// Tensile strain of a bond: (u_j - u_i) . e_ij / |x_j - x_i|.
inline double bond_strain(const Vec2 &ui, const Vec2 &uj, const Vec2 &e, double distance) {
  return dot(uj - ui, e) / distance;
}

/// Discrete nonlocal force: one-point quadrature per neighbor cell with
/// partial-volume weights. Bonds across cracks are skipped everywhere.
class NonlocalOperator {
public:
  NonlocalOperator(std::shared_ptr<const Discretization> disc, MaterialModel material);

  const Discretization &discretization() const { return *disc_; }
  std::shared_ptr<const Discretization> shared_discretization() const { return disc_; }
  const Grid &grid() const { return disc_->grid; }
  const NeighborTable &bonds() const { return disc_->bonds; }
  const MaterialModel &material() const { return material_; }
  std::size_t size() const { return disc_->grid.size(); }

  /// Hydrostatic strain at node i.
  double hydrostatic_strain(std::span<const Vec2> u, std::size_t i) const;
  /// Hydrostatic strain at every node.
  void hydrostatic_strains(std::span<const Vec2> u, std::span<double> theta) const;

  Vec2 tensile_force(std::span<const Vec2> u, std::size_t i) const;
  /// Requires theta for all nodes of the same displacement field.
  Vec2 dilatational_force(std::span<const Vec2> theta_owner_u, std::span<const double> theta,
                          std::size_t i) const;

  /// Two-pass assembly of L(u) + b. `theta` (size N) receives the hydrostatic
  /// strain computed in the first pass. Throws NumericalError on non-finite
  /// output.
  void assemble(std::span<const Vec2> u, double t, const BodyForce *body, std::span<Vec2> force,
                std::span<double> theta) const;
  std::vector<Vec2> assemble(std::span<const Vec2> u, double t = 0.0,
                             const BodyForce *body = nullptr) const;

  /// Tensile part of the potential-energy density at node i,
  /// (1/(eps^d omega_d)) sum_j |x_j - x_i| W(S) V_j Vbar_ij.
  double bond_energy_density(std::span<const Vec2> u, std::size_t i) const;
  /// Dilatational energy density omega_i g(theta_i) / eps^2.
  double dilatational_energy_density(double theta, std::size_t i) const;

  /// max_j S_ij / S_c(|x_j - x_i|) over visible bonds (0 for isolated nodes).
  double damage(std::span<const Vec2> u, std::size_t i) const;
  void damage_field(std::span<const Vec2> u, std::span<double> z) const;

private:
  std::shared_ptr<const Discretization> disc_;
  MaterialModel material_;
  double eps_;
  // Per-bond J(|xi|/eps) V_j Vbar_ij / (eps^d omega_d) and 1/sqrt(|xi|).
  std::vector<double> bond_weight_;
  std::vector<double> inv_sqrt_length_;
};

} // namespace pdfrac
