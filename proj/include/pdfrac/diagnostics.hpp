#pragma once

#include "pdfrac/geometry.hpp"
#include "pdfrac/nonlocal.hpp"

#include <limits>
#include <span>
#include <vector>

namespace pdfrac {

struct DiagnosticRecord {
  double t = 0.0;
  double kinetic = 0.0;
  double pd = 0.0;
  double total = 0.0;
  double augmented = 0.0;
  double pe = 0.0;
  double ge = 0.0;
  double crack_length = 0.0;
  double max_z = 0.0;
  double u_l2 = 0.0;
  double v_l2 = 0.0;

  friend bool operator==(const DiagnosticRecord &, const DiagnosticRecord &) = default;
};

/// Reference point and growth direction of one crack tip.
struct CrackTip {
  Vec2 tip;
  Vec2 direction{0.0, 1.0};
  double initial_length = 0.0;
  /// Only nodes within this distance of the line through the tip along
  /// `direction` are considered.
  double band = std::numeric_limits<double>::infinity();
};

std::vector<double> damage_field(const NonlocalOperator &op, std::span<const Vec2> u);

/// Sum over tips of initial length + h * (number of contiguous rows beyond
/// the tip that contain a node with Z >= 1).
double crack_length(std::span<const double> z, const Grid &grid, std::span<const CrackTip> tips);
double crack_length(std::span<const double> z, const Grid &grid, const CrackTip &tip);

struct Energies {
  double kinetic = 0.0;
  double pd = 0.0;
  double total = 0.0;
  double augmented = 0.0;
};

/// `theta` must be the hydrostatic strain of state.u.
Energies energies(const NonlocalOperator &op, const FieldState &state,
                  std::span<const double> theta);
Energies energies(const NonlocalOperator &op, const FieldState &state);

struct FractureEnergies {
  double pe = 0.0;
  double ge = 0.0;
};

/// PE: bond part of the potential energy over nodes with Z >= 1.
/// GE: G_c * crack_length.
FractureEnergies fracture_energies(const NonlocalOperator &op, const FieldState &state,
                                   std::span<const double> z, double crack_length);

double l2_norm(std::span<const double> a, const Grid &grid);
double l2_norm(std::span<const Vec2> a, const Grid &grid);

/// Exact L2 norm of the difference of two piecewise-constant fields, each
/// constant on the clipped cells of its own grid. Both grids must cover the
/// same box with spacing ratio 1 or 2; otherwise UnsupportedConfiguration.
double l2_difference(std::span<const double> a, const Grid &ga, std::span<const double> b,
                     const Grid &gb);
double l2_difference(std::span<const Vec2> a, const Grid &ga, std::span<const Vec2> b,
                     const Grid &gb);

/// (log e12 - log e23) / log r.
double convergence_rate(double e12, double e23, double ratio);

/// All diagnostics for one state.
DiagnosticRecord diagnose(const NonlocalOperator &op, const FieldState &state,
                          std::span<const CrackTip> tips);

struct StabilityReport {
  std::vector<double> t;
  std::vector<double> energy_ratio; // E(t) / E(0)
  double max_energy_ratio = 0.0;     // max |E(t) / E(0)|
  /// Smallest C with sqrt(E(t)) <= sqrt(E(0)) + t C / eps^2 + int ||b|| / sqrt(rho).
  double fitted_c = 0.0;
  /// Exponential envelope for the augmented energy; C1 is held at 0 and C2
  /// is the smallest value for which the envelope holds at every sample.
  double fitted_c1 = 0.0;
  double fitted_c2 = 0.0;
  bool envelope_satisfied = true;
  bool finite = true;
  bool stable = true;
};

/// `b_norm[k]` is ||b(t_k)||_{L2} at the record times (empty means b = 0).
/// A run is flagged unstable when any energy is non-finite or |E(t)/E(0)|
/// exceeds 1 + tolerance. The magnitude matters because a quadratic g with
/// negative stiffness makes the energy indefinite, so a blow-up can drive E
/// towards -infinity.
StabilityReport stability_report(std::span<const DiagnosticRecord> series,
                                 std::span<const double> b_norm, double horizon, double density,
                                 double tolerance = 0.01);

} // namespace pdfrac
