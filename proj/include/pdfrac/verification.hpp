#pragma once

#include "pdfrac/diagnostics.hpp"
#include "pdfrac/geometry.hpp"
#include "pdfrac/nonlocal.hpp"
#include "pdfrac/potentials.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pdfrac {

/// Largest grid accepted by the O(N^2) oracles.
inline constexpr std::size_t kBruteForceLimit = 4096;

/// All-pairs evaluation of theta, the total force and PD with long double
/// accumulation. Uses only the grid, the DomainSpec and omega of `disc`
/// (not its neighbor table). Throws UnsupportedConfiguration above
/// kBruteForceLimit nodes.
std::vector<double> brute_force_theta(const Discretization &disc, const MaterialModel &m,
                                      std::span<const Vec2> u);
std::vector<Vec2> brute_force_force(const Discretization &disc, const MaterialModel &m,
                                    std::span<const Vec2> u);
double brute_force_potential_energy(const Discretization &disc, const MaterialModel &m,
                                    std::span<const Vec2> u);

/// max_i |a_i - b_i| / max_i |b_i| (0 when both vanish).
double max_relative_difference(std::span<const Vec2> a, std::span<const Vec2> b);

/// Random field with components uniform in [-amplitude, amplitude].
std::vector<Vec2> random_field(std::size_t n, double amplitude, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Manufactured solutions

/// Analytic u*(x, t) together with its first and second time derivatives.
struct ManufacturedSolution {
  std::function<Vec2(const Vec2 &, double)> u;
  std::function<Vec2(const Vec2 &, double)> v;
  std::function<Vec2(const Vec2 &, double)> a;
};

/// u* = A sin(pi (x - x0) / Lx) sin(pi (y - y0) / Ly) sin(omega t) (1, 1).
ManufacturedSolution smooth_manufactured(const Rect &box, double amplitude, double omega);

/// b_i(t) = rho a*(x_i, t) - L(u*(t))(x_i), so that u* solves the
/// semi-discrete equations exactly.
BodyForce manufactured_body_force(std::shared_ptr<const NonlocalOperator> op,
                                  ManufacturedSolution solution);

/// Initial state (u*(0), v*(0)) on the nodes.
FieldState manufactured_initial_state(const Grid &grid, const ManufacturedSolution &solution);

// ---------------------------------------------------------------------------
// Studies

/// Result of running a scenario at one resolution: the grid used and the
/// states at the requested comparison times.
struct StudyRun {
  std::shared_ptr<const Discretization> disc;
  std::vector<FieldState> states;
};

/// Runs a scenario with spacing h and step dt and returns the states at the
/// given times (each rounded to the nearest step).
using StudyRunner =
    std::function<StudyRun(double h, double dt, std::span<const double> times)>;

/// ||u1 - u2|| + ||v1 - v2|| between states on two grids.
double state_difference(const FieldState &a, const Grid &ga, const FieldState &b,
                        const Grid &gb);

struct SpatialRow {
  double horizon = 0.0;
  double t = 0.0;
  double e12 = 0.0;
  double e23 = 0.0;
  double rate = std::numeric_limits<double>::quiet_NaN();
  bool rate_defined = false;
};

struct SpatialStudy {
  std::vector<double> h;           // the three spacings
  std::vector<std::size_t> nodes;  // node count per level
  std::vector<SpatialRow> rows;
};

/// Runs levels h[0] > h[1] > h[2] (ratio 2) and compares consecutive
/// levels at every time.
SpatialStudy spatial_convergence_study(const StudyRunner &runner, double horizon,
                                       std::span<const double> h, double dt,
                                       std::span<const double> times);

struct TemporalRow {
  double dt = 0.0;
  double error = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN(); // vs previous row
};

struct TemporalStudy {
  std::vector<TemporalRow> rows;
  double fitted_order = std::numeric_limits<double>::quiet_NaN(); // least squares
  bool order_defined = false;
};

/// Error at `final_time` against a reference run with dt_ref <= min(dt)/8.
TemporalStudy temporal_convergence_study(const StudyRunner &runner, double h,
                                         std::span<const double> dts, double dt_ref,
                                         double final_time);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Projection error

/// Fields depending on x only, on the unit square.
///   Linear: u = x, gamma = 1, seminorm 1.
///   Weierstrass: u = sum_k 2^(-k gamma) cos(2^k pi x), k < terms.
struct ProjectionField {
  enum class Kind { Constant, Linear, Weierstrass };
  Kind kind = Kind::Linear;
  double gamma = 1.0;
  int terms = 40;
  double constant = 1.0;

  double operator()(double x) const;
  /// Exact integral over [a, b].
  double integral(double a, double b) const;
  /// Exact integral of u^2 over [0, 1].
  double square_integral() const;
  /// Hoelder seminorm: exact for Constant/Linear, a sampled lower bound for
  /// Weierstrass (which keeps the bound check conservative).
  double seminorm() const;
};

/// Exact ||P_h u - u||_{L2([0,1]^2)} for the cell-average projection on
/// the clipped cells of the vertex grid with spacing h.
double projection_error(const ProjectionField &field, double h);

struct ProjectionCase {
  std::string name;
  double gamma = 0.0;
  std::vector<double> h;
  std::vector<double> error;
  std::vector<double> bound; // sqrt(2)^gamma sqrt(|D|) [u]_gamma h^gamma
  double fitted_exponent = 0.0;
  bool bound_ok = true;
  bool exponent_ok = true;
};

struct ProjectionReport {
  std::vector<ProjectionCase> cases;
  bool ok = true;
};

ProjectionReport projection_error_suite(std::span<const double> gammas, std::span<const double> h,
                                        double exponent_tolerance = 0.1);

// ---------------------------------------------------------------------------
// Lipschitz bound

struct LipschitzReport {
  double l3 = 0.0;
  std::vector<double> ratios; // ||L(u) - L(v)|| eps^2 / (L3 ||u - v||)
  double max_ratio = 0.0;
  std::size_t worst_trial = 0;
  std::vector<Vec2> worst_u;
  std::vector<Vec2> worst_v;
  bool ok = true;
};

/// Random pairs on the n x n node grid of [0, (n - 1) h]^2 with horizon
/// m.horizon. Amplitudes cycle through 0.1, 1 and 10 times the critical
/// displacement r_bar sqrt(horizon).
LipschitzReport lipschitz_l2_suite(const MaterialModel &m, int n, double h, int trials,
                                   std::uint64_t seed,
                                   BoundaryWeightMode mode = BoundaryWeightMode::Indicator);

} // namespace pdfrac
