#include "pdfrac/potentials.hpp"

#include "pdfrac/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pdfrac {

namespace {

constexpr int kBoundSamples = 100000;
constexpr double kBoundSpan = 20.0; // multiples of the inflection point

template <class Fn> double sampled_sup(Fn &&fn, double half_width) {
  double sup = 0.0;
  for (int k = 0; k <= kBoundSamples; ++k) {
    const double r = -half_width + 2.0 * half_width * k / kBoundSamples;
    sup = std::max(sup, std::abs(fn(r)));
  }
  return sup;
}

} // namespace

// ---------------------------------------------------------------------------
// InfluenceFunction

InfluenceFunction::InfluenceFunction(Kind kind, double value, std::vector<double> samples)
    : kind_(kind), value_(value), bound_(0.0), samples_(std::move(samples)) {
  switch (kind_) {
  case Kind::LinearDecay:
    bound_ = 1.0;
    break;
  case Kind::Constant:
    bound_ = value_;
    break;
  case Kind::Tabulated:
    bound_ = *std::max_element(samples_.begin(), samples_.end());
    break;
  }
}

InfluenceFunction InfluenceFunction::linear_decay() { return {Kind::LinearDecay, 0.0, {}}; }

InfluenceFunction InfluenceFunction::constant(double value) {
  if (!(value >= 0.0))
    throw DomainError("constant influence function must be non-negative");
  return {Kind::Constant, value, {}};
}

InfluenceFunction InfluenceFunction::tabulated(std::vector<double> samples) {
  if (samples.size() < 2)
    throw DomainError("tabulated influence function needs at least two samples");
  for (double s : samples)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw DomainError("tabulated influence samples must be finite and non-negative");
  return {Kind::Tabulated, 0.0, std::move(samples)};
}

double InfluenceFunction::operator()(double r) const {
  if (r >= 1.0 || r < 0.0)
    return 0.0;
  switch (kind_) {
  case Kind::LinearDecay:
    return 1.0 - r;
  case Kind::Constant:
    return value_;
  case Kind::Tabulated: {
    const double pos = r * static_cast<double>(samples_.size() - 1);
    const auto k = static_cast<std::size_t>(pos);
    const double t = pos - static_cast<double>(k);
    return (1.0 - t) * samples_[k] + t * samples_[k + 1];
  }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// TensilePotential

TensilePotential::TensilePotential(double c, double beta)
    : c_(c), beta_(beta), inflection_(1.0 / std::sqrt(2.0 * beta)) {
  if (!(beta > 0.0) || !(c >= 0.0))
    throw DomainError("tensile potential needs c >= 0 and beta > 0");
  const double span = kBoundSpan * inflection_;
  // f is monotone in |r| and saturates at c, so sup |f| is the asymptote.
  bounds_[0] = c_;
  bounds_[1] = sampled_sup([this](double r) { return first(r); }, span);
  bounds_[2] = sampled_sup([this](double r) { return second(r); }, span);
  bounds_[3] = sampled_sup([this](double r) { return third(r); }, span);
}

double TensilePotential::value(double r) const { return c_ * (1.0 - std::exp(-beta_ * r * r)); }

double TensilePotential::first(double r) const {
  return 2.0 * c_ * beta_ * r * std::exp(-beta_ * r * r);
}

double TensilePotential::second(double r) const {
  const double br2 = beta_ * r * r;
  return 2.0 * c_ * beta_ * (1.0 - 2.0 * br2) * std::exp(-br2);
}

double TensilePotential::third(double r) const {
  const double br2 = beta_ * r * r;
  return 2.0 * c_ * beta_ * beta_ * r * (4.0 * br2 - 6.0) * std::exp(-br2);
}

// ---------------------------------------------------------------------------
// DilatationalPotential

DilatationalPotential::DilatationalPotential(Kind kind, double scale, double beta)
    : kind_(kind), scale_(scale), beta_(beta) {
  if (kind_ == Kind::Quadratic) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    bounds_ = {inf, inf, std::abs(scale_), 0.0};
    return;
  }
  if (!(beta_ > 0.0))
    throw DomainError("convex-concave dilatational potential needs beta > 0");
  const TensilePotential shape(scale_ >= 0.0 ? scale_ : -scale_, beta_);
  bounds_ = shape.bounds();
}

DilatationalPotential DilatationalPotential::quadratic(double stiffness) {
  return {Kind::Quadratic, stiffness, 0.0};
}

DilatationalPotential DilatationalPotential::convex_concave(double c_g, double beta_g) {
  return {Kind::ConvexConcave, c_g, beta_g};
}

double DilatationalPotential::value(double theta) const {
  if (kind_ == Kind::Quadratic)
    return 0.5 * scale_ * theta * theta;
  return scale_ * (1.0 - std::exp(-beta_ * theta * theta));
}

double DilatationalPotential::first(double theta) const {
  if (kind_ == Kind::Quadratic)
    return scale_ * theta;
  return 2.0 * scale_ * beta_ * theta * std::exp(-beta_ * theta * theta);
}

double DilatationalPotential::second(double theta) const {
  if (kind_ == Kind::Quadratic)
    return scale_;
  const double bt2 = beta_ * theta * theta;
  return 2.0 * scale_ * beta_ * (1.0 - 2.0 * bt2) * std::exp(-bt2);
}

std::array<double, 2> DilatationalPotential::inflections() const {
  if (kind_ == Kind::Quadratic)
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const double r = 1.0 / std::sqrt(2.0 * beta_);
  return {-r, r};
}

// ---------------------------------------------------------------------------
// MaterialModel

void MaterialModel::validate() const {
  if (!(horizon > 0.0))
    throw DomainError("horizon must be positive");
  if (!(density > 0.0))
    throw DomainError("density must be positive");
  if (dimension != 2 && dimension != 3)
    throw DomainError("dimension must be 2 or 3");
}

MaterialModel material_preset(std::string_view name, double horizon) {
  constexpr double c = 4712.4;
  double cbar = 0.0;
  double beta = 0.0;
  if (name == "nu022") {
    cbar = -1.0623e12;
    beta = 1.7533e8;
  } else if (name == "nu0245") {
    cbar = -1.7349e11;
    beta = 1.5647e8;
  } else {
    throw ConfigError("unknown material preset '" + std::string(name) + "'");
  }
  MaterialModel m{1200.0,
                  horizon,
                  InfluenceFunction::linear_decay(),
                  TensilePotential(c, beta),
                  DilatationalPotential::quadratic(cbar),
                  2,
                  500.0,
                  25.0e9};
  m.validate();
  return m;
}

std::vector<std::string> material_preset_names() { return {"nu022", "nu0245"}; }

double unit_ball_volume(int dimension) {
  switch (dimension) {
  case 1:
    return 2.0;
  case 2:
    return std::numbers::pi;
  case 3:
    return 4.0 * std::numbers::pi / 3.0;
  default:
    throw DomainError("unit ball volume only defined for d = 1, 2, 3");
  }
}

double influence_moment(const InfluenceFunction &influence, double alpha, int dimension) {
  if (dimension != 2 && dimension != 3)
    throw DomainError("influence moment: dimension must be 2 or 3");
  if (!(alpha < dimension))
    throw DomainError("influence moment: |xi|^(-alpha) is not integrable for alpha >= d");

  // Surface of the unit sphere is d * omega_d, so the moment reduces to
  // d * int_0^1 J(r) r^p dr with p = d - 1 - alpha > -1. The substitution
  // r = s^m, m = 1 / (p + 1), removes the endpoint singularity.
  const double p = dimension - 1.0 - alpha;
  const double m = 1.0 / (p + 1.0);
  auto integrand = [&](double s) { return m * influence(std::pow(s, m)); };

  // Kinks of a tabulated J sit at r_k = k / (n - 1), i.e. s_k = r_k^(1/m).
  std::vector<double> breaks{0.0, 1.0};
  if (influence.kind() == InfluenceFunction::Kind::Tabulated) {
    const std::size_t n = influence.samples().size();
    breaks.clear();
    for (std::size_t k = 0; k < n; ++k)
      breaks.push_back(std::pow(static_cast<double>(k) / static_cast<double>(n - 1), 1.0 / m));
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, breaks[k], breaks[k + 1], 20, 1e-12);
  return dimension * total;
}

double critical_bond_strain(const TensilePotential &f, double bond_length) {
  if (!(bond_length > 0.0))
    throw DomainError("critical bond strain needs a positive bond length");
  return f.inflection() / std::sqrt(bond_length);
}

double lipschitz_constant(const MaterialModel &model) {
  const double j0 = influence_moment(model.influence, 0.0, model.dimension);
  const double j1 = influence_moment(model.influence, 1.0, model.dimension);
  const double cg2 = model.dilatational.kind() == DilatationalPotential::Kind::Quadratic
                         ? std::abs(model.dilatational.second_at_zero())
                         : model.dilatational.bounds()[2];
  return 4.0 * (model.tensile.bounds()[2] * j1 + cg2 * j0 * j0);
}

} // namespace pdfrac
