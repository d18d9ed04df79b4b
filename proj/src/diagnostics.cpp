#include "pdfrac/diagnostics.hpp"

#include "pdfrac/errors.hpp"
#include "pdfrac/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pdfrac {

std::vector<double> damage_field(const NonlocalOperator &op, std::span<const Vec2> u) {
  std::vector<double> z(op.size());
  op.damage_field(u, z);
  return z;
}

double crack_length(std::span<const double> z, const Grid &grid, const CrackTip &tip) {
  const double h = grid.h();
  const double tol = grid.tolerance();
  const Vec2 dir = (1.0 / norm(tip.direction)) * tip.direction;
  std::set<long> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(z[i] >= 1.0))
      continue;
    const Vec2 rel = grid.coord(i) - tip.tip;
    const double s = dot(rel, dir);
    if (s <= tol || std::abs(cross(dir, rel)) > tip.band + tol)
      continue;
    rows.insert(static_cast<long>(std::floor((s - tol) / h)) + 1);
  }
  long run = 0;
  while (rows.count(run + 1))
    ++run;
  return tip.initial_length + static_cast<double>(run) * h;
}

double crack_length(std::span<const double> z, const Grid &grid, std::span<const CrackTip> tips) {
  double total = 0.0;
  for (const auto &tip : tips)
    total += crack_length(z, grid, tip);
  return total;
}

Energies energies(const NonlocalOperator &op, const FieldState &state,
                  std::span<const double> theta) {
  const Grid &g = op.grid();
  const double rho = op.material().density;
  const std::size_t n = op.size();
  // Per-node terms first (in parallel), then a sequential
  // reduction in node order so the sums do not depend on the thread count.
  std::vector<double> bond(n);
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long i = 0; i < count; ++i)
    bond[static_cast<std::size_t>(i)] = op.bond_energy_density(state.u, static_cast<std::size_t>(i));
  Energies e;
  double u2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double vol = g.volume(i);
    e.kinetic += 0.5 * rho * norm2(state.v[i]) * vol;
    e.pd += (bond[i] + op.dilatational_energy_density(theta[i], i)) * vol;
    u2 += norm2(state.u[i]) * vol;
  }
  e.total = e.kinetic + e.pd;
  e.augmented = e.total + 0.5 * u2;
  return e;
}

Energies energies(const NonlocalOperator &op, const FieldState &state) {
  std::vector<double> theta(op.size());
  op.hydrostatic_strains(state.u, theta);
  return energies(op, state, theta);
}

FractureEnergies fracture_energies(const NonlocalOperator &op, const FieldState &state,
                                   std::span<const double> z, double crack_length) {
  FractureEnergies out;
  for (std::size_t i = 0; i < op.size(); ++i)
    if (z[i] >= 1.0)
      out.pe += op.bond_energy_density(state.u, i) * op.grid().volume(i);
  out.ge = op.material().fracture_toughness * crack_length;
  return out;
}

double l2_norm(std::span<const double> a, const Grid &grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * a[i] * grid.volume(i);
  return std::sqrt(s);
}

double l2_norm(std::span<const Vec2> a, const Grid &grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += norm2(a[i]) * grid.volume(i);
  return std::sqrt(s);
}

namespace {

void check_comparable(const Grid &ga, const Grid &gb) {
  const double tol = 1e-9 * std::max(ga.h(), gb.h());
  const Rect &a = ga.box();
  const Rect &b = gb.box();
  if (std::abs(a.x0 - b.x0) > tol || std::abs(a.x1 - b.x1) > tol || std::abs(a.y0 - b.y0) > tol ||
      std::abs(a.y1 - b.y1) > tol)
    throw UnsupportedConfiguration("l2_difference: grids cover different domains");
  const double ratio = std::max(ga.h(), gb.h()) / std::min(ga.h(), gb.h());
  if (std::abs(ratio - 1.0) > 1e-9 && std::abs(ratio - 2.0) > 1e-9)
    throw UnsupportedConfiguration("l2_difference: grid spacing ratio must be 1 or 2");
}

std::vector<double> merge_breaks(const std::vector<double> &a, const std::vector<double> &b,
                                 double tol) {
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double x : all)
    if (out.empty() || x - out.back() > tol)
      out.push_back(x);
  return out;
}

// Cell index along one axis containing the point x (strictly inside a cell).
std::size_t locate(const std::vector<double> &breaks, double x) {
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - breaks.begin() - 1, 0,
                                                             std::ssize(breaks) - 2));
}

template <class T, class Sq>
double l2_difference_impl(std::span<const T> a, const Grid &ga, std::span<const T> b,
                          const Grid &gb, Sq sq) {
  check_comparable(ga, gb);
  if (a.size() != ga.size() || b.size() != gb.size())
    throw DomainError("l2_difference: field size does not match its grid");
  const double tol = 1e-9 * std::min(ga.h(), gb.h());
  const auto xs = merge_breaks(ga.x_breaks(), gb.x_breaks(), tol);
  const auto ys = merge_breaks(ga.y_breaks(), gb.y_breaks(), tol);
  std::vector<std::size_t> ax(xs.size() - 1), bx(xs.size() - 1);
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double mid = 0.5 * (xs[k] + xs[k + 1]);
    ax[k] = locate(ga.x_breaks(), mid);
    bx[k] = locate(gb.x_breaks(), mid);
  }
  double s = 0.0;
  for (std::size_t l = 0; l + 1 < ys.size(); ++l) {
    const double mid = 0.5 * (ys[l] + ys[l + 1]);
    const int ar = static_cast<int>(locate(ga.y_breaks(), mid));
    const int br = static_cast<int>(locate(gb.y_breaks(), mid));
    const double dy = ys[l + 1] - ys[l];
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      const T &va = a[ga.index(static_cast<int>(ax[k]), ar)];
      const T &vb = b[gb.index(static_cast<int>(bx[k]), br)];
      s += sq(va, vb) * (xs[k + 1] - xs[k]) * dy;
    }
  }
  return std::sqrt(s);
}

} // namespace

double l2_difference(std::span<const double> a, const Grid &ga, std::span<const double> b,
                     const Grid &gb) {
  return l2_difference_impl<double>(a, ga, b, gb, [](double x, double y) {
    const double d = x - y;
    return d * d;
  });
}

double l2_difference(std::span<const Vec2> a, const Grid &ga, std::span<const Vec2> b,
                     const Grid &gb) {
  return l2_difference_impl<Vec2>(a, ga, b, gb,
                                  [](const Vec2 &x, const Vec2 &y) { return norm2(x - y); });
}

double convergence_rate(double e12, double e23, double ratio) {
  if (!(e12 > 0.0) || !(e23 > 0.0))
    throw DomainError("convergence rate needs positive errors");
  if (!(ratio > 1.0))
    throw DomainError("convergence rate needs a refinement ratio > 1");
  return (std::log(e12) - std::log(e23)) / std::log(ratio);
}

DiagnosticRecord diagnose(const NonlocalOperator &op, const FieldState &state,
                          std::span<const CrackTip> tips) {
  std::vector<double> theta(op.size());
  op.hydrostatic_strains(state.u, theta);
  const auto z = damage_field(op, state.u);
  const Energies e = energies(op, state, theta);
  DiagnosticRecord r;
  r.t = state.t;
  r.kinetic = e.kinetic;
  r.pd = e.pd;
  r.total = e.total;
  r.augmented = e.augmented;
  r.crack_length = crack_length(z, op.grid(), tips);
  const FractureEnergies fe = fracture_energies(op, state, z, r.crack_length);
  r.pe = fe.pe;
  r.ge = fe.ge;
  r.max_z = z.empty() ? 0.0 : *std::max_element(z.begin(), z.end());
  r.u_l2 = l2_norm(std::span<const Vec2>(state.u), op.grid());
  r.v_l2 = l2_norm(std::span<const Vec2>(state.v), op.grid());
  return r;
}

namespace {

// Envelope of the augmented energy with C1 = 0 for a given exponent a:
// exp(a t) E(0) + int_0^t b^2 exp(a (t - s)) ds, trapezoid in s.
bool quadratic_envelope_holds(std::span<const DiagnosticRecord> s, std::span<const double> b2,
                              double a) {
  const double e0 = s.front().augmented;
  double integral = 0.0; // int_0^t b^2 exp(-a s) ds
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k > 0 && !b2.empty()) {
      const double dt = s[k].t - s[k - 1].t;
      integral += 0.5 * dt * (b2[k - 1] * std::exp(-a * s[k - 1].t) + b2[k] * std::exp(-a * s[k].t));
    }
    const double bound = std::exp(a * s[k].t) * (e0 + integral);
    // |E| so that a run diving to large negative energy (indefinite g) fails.
    if (std::abs(s[k].augmented) > bound * (1.0 + 1e-12) + 1e-300)
      return false;
  }
  return true;
}

} // namespace

StabilityReport stability_report(std::span<const DiagnosticRecord> series,
                                 std::span<const double> b_norm, double horizon, double density,
                                 double tolerance) {
  StabilityReport r;
  if (series.empty())
    return r;
  if (!b_norm.empty() && b_norm.size() != series.size())
    throw DomainError("stability_report: b_norm must match the record series");
  const double e0 = series.front().total;
  const double eps2 = horizon * horizon;
  double b_int = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto &rec = series[k];
    if (k > 0 && !b_norm.empty())
      b_int += 0.5 * (rec.t - series[k - 1].t) * (b_norm[k] + b_norm[k - 1]) / std::sqrt(density);
    const double ratio = e0 != 0.0 ? rec.total / e0 : (rec.total == 0.0 ? 1.0 : INFINITY);
    r.t.push_back(rec.t);
    r.energy_ratio.push_back(ratio);
    if (!std::isfinite(rec.total) || !std::isfinite(rec.augmented) || !std::isfinite(ratio))
      r.finite = false;
    else
      r.max_energy_ratio = std::max(r.max_energy_ratio, std::abs(ratio));
    if (rec.t > 0.0 && std::isfinite(rec.total)) {
      const double excess = std::sqrt(std::max(rec.total, 0.0)) -
                            std::sqrt(std::max(e0, 0.0)) - b_int;
      r.fitted_c = std::max(r.fitted_c, excess * eps2 / rec.t);
    }
  }
  if (!r.finite) {
    r.fitted_c = INFINITY;
    r.fitted_c2 = INFINITY;
    r.envelope_satisfied = false;
    r.stable = false;
    return r;
  }

  std::vector<double> b2;
  for (double b : b_norm)
    b2.push_back(b * b / density);
  // a = 3 (C2 / eps^2 + 1); the envelope grows with a, so bisect on a >= 3.
  double lo = 3.0;
  if (quadratic_envelope_holds(series, b2, lo)) {
    r.fitted_c2 = 0.0;
  } else {
    double hi = 6.0;
    while (!quadratic_envelope_holds(series, b2, hi) && hi < 1e300)
      hi *= 2.0;
    if (!quadratic_envelope_holds(series, b2, hi)) {
      r.envelope_satisfied = false;
      r.fitted_c2 = INFINITY;
    } else {
      for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (quadratic_envelope_holds(series, b2, mid) ? hi : lo) = mid;
      }
      r.fitted_c2 = (hi / 3.0 - 1.0) * eps2;
    }
  }
  r.stable = r.finite && r.max_energy_ratio <= 1.0 + tolerance;
  return r;
}

} // namespace pdfrac
