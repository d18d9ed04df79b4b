#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace pdfrac {

/// Radial influence function J(r), r = |y - x| / horizon. Zero for r >= 1.
class InfluenceFunction {
public:
  enum class Kind { LinearDecay, Constant, Tabulated };

  /// J(r) = 1 - r on [0, 1).
  static InfluenceFunction linear_decay();
  /// J(r) = value on [0, 1).
  static InfluenceFunction constant(double value = 1.0);
  /// Piecewise-linear interpolation of samples taken at r_k = k / (n - 1).
  static InfluenceFunction tabulated(std::vector<double> samples);

  double operator()(double r) const;
  Kind kind() const { return kind_; }
  /// Upper bound M of J on [0, 1).
  double bound() const { return bound_; }
  const std::vector<double> &samples() const { return samples_; }

private:
  InfluenceFunction(Kind kind, double value, std::vector<double> samples);

  Kind kind_;
  double value_;
  double bound_;
  std::vector<double> samples_;
};

/// Bounds C_0..C_3 on a potential function and its first three derivatives.
using DerivativeBounds = std::array<double, 4>;

/// Tensile bond potential f(r) = c (1 - exp(-beta r^2)).
class TensilePotential {
public:
  TensilePotential(double c, double beta);

  double value(double r) const;
  double first(double r) const;
  double second(double r) const;
  double third(double r) const;

  double c() const { return c_; }
  double beta() const { return beta_; }
  /// Inflection point of f, 1 / sqrt(2 beta).
  double inflection() const { return inflection_; }
  /// lim f(r) as |r| -> infinity.
  double asymptote() const { return c_; }
  const DerivativeBounds &bounds() const { return bounds_; }

private:
  double c_;
  double beta_;
  double inflection_;
  DerivativeBounds bounds_{};
};

/// Potential g(theta) for the hydrostatic strain: either quadratic or
/// convex-concave of the form c_g (1 - exp(-beta_g theta^2)).
class DilatationalPotential {
public:
  enum class Kind { Quadratic, ConvexConcave };

  static DilatationalPotential quadratic(double stiffness);
  static DilatationalPotential convex_concave(double c_g, double beta_g);

  double value(double theta) const;
  double first(double theta) const;
  double second(double theta) const;

  Kind kind() const { return kind_; }
  /// C-bar for the quadratic kind, c_g for the convex-concave kind.
  double scale() const { return scale_; }
  double beta() const { return beta_; }
  double second_at_zero() const { return second(0.0); }
  /// Inflection points (r_minus, r_plus); only meaningful for convex-concave.
  std::array<double, 2> inflections() const;
  /// Sampled derivative bounds; entries are +inf for the quadratic kind
  /// except the second derivative, which equals |C-bar|.
  const DerivativeBounds &bounds() const { return bounds_; }

private:
  DilatationalPotential(Kind kind, double scale, double beta);

  Kind kind_;
  double scale_;
  double beta_;
  DerivativeBounds bounds_{};
};

struct MaterialModel {
  double density;           // kg / m^3
  double horizon;           // m
  InfluenceFunction influence;
  TensilePotential tensile;
  DilatationalPotential dilatational;
  int dimension = 2;
  double fracture_toughness = 500.0; // G_c, J / m^2
  double bulk_modulus = 25.0e9;      // Pa, only used for the time step warning

  void validate() const;
};

/// Tabulated material sets at bulk modulus 25 GPa, G_c = 500, rho = 1200.
/// Known names: "nu022", "nu0245".
MaterialModel material_preset(std::string_view name, double horizon);
std::vector<std::string> material_preset_names();

/// Volume of the unit ball in dimension d (pi for d = 2).
double unit_ball_volume(int dimension);

/// (1/omega_d) * integral over the unit ball of J(|xi|) |xi|^(-alpha).
double influence_moment(const InfluenceFunction &influence, double alpha, int dimension);

/// Critical bond strain r_bar / sqrt(bond_length).
double critical_bond_strain(const TensilePotential &f, double bond_length);

/// Lipschitz constant of the nonlocal force in L^2:
/// 4 (C^f_2 J_1 + C^g_2 J_0^2), with |g''(0)| for quadratic g.
double lipschitz_constant(const MaterialModel &model);

} // namespace pdfrac
