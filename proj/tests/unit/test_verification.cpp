#include "pdfrac/errors.hpp"
#include "pdfrac/integrator.hpp"
#include "pdfrac/verification.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace pdfrac;

TEST(Oracle, RefusesLargeGrids) {
  const double h = 1e-3;
  auto disc = Discretization::build({{0.0, 70 * h, 0.0, 70 * h}, {}}, h, 0.3 * h);
  ASSERT_GT(disc->grid.size(), kBruteForceLimit);
  const auto m = material_preset("nu0245", 0.3 * h);
  const std::vector<Vec2> u(disc->grid.size());
  EXPECT_THROW(brute_force_force(*disc, m, u), UnsupportedConfiguration);
}

TEST(Oracle, MaxRelativeDifference) {
  const std::vector<Vec2> a{{1.0, 0.0}, {0.0, 2.0}};
  const std::vector<Vec2> b{{1.0, 0.0}, {0.0, 4.0}};
  EXPECT_DOUBLE_EQ(max_relative_difference(a, b), 0.5);
  const std::vector<Vec2> z(2);
  EXPECT_EQ(max_relative_difference(z, z), 0.0);
}

TEST(Oracle, RandomFieldIsSeeded) {
  EXPECT_EQ(random_field(50, 1.0, 9), random_field(50, 1.0, 9));
  EXPECT_NE(random_field(50, 1.0, 9), random_field(50, 1.0, 10));
  for (const auto &p : random_field(200, 0.5, 1)) {
    EXPECT_LE(std::abs(p.x), 0.5);
    EXPECT_LE(std::abs(p.y), 0.5);
  }
}

TEST(Manufactured, DerivativesAreConsistent) {
  const auto s = smooth_manufactured({0.0, 0.05, 0.0, 0.05}, 1e-6, 2 * std::numbers::pi * 2.5e5);
  const Vec2 x{0.013, 0.031};
  const double t = 3.3e-7;
  const double dt = 1e-11;
  const Vec2 v_fd = (1.0 / (2 * dt)) * (s.u(x, t + dt) - s.u(x, t - dt));
  const Vec2 a_fd = (1.0 / (2 * dt)) * (s.v(x, t + dt) - s.v(x, t - dt));
  EXPECT_NEAR(v_fd.x, s.v(x, t).x, 1e-6 * std::abs(s.v(x, t).x));
  EXPECT_NEAR(a_fd.y, s.a(x, t).y, 1e-6 * std::abs(s.a(x, t).y));
  EXPECT_EQ(s.u({0.0, 0.02}, t), Vec2{});
}

TEST(Manufactured, DiscreteRunConvergesAtFirstOrder) {
  const Rect box{0.0, 0.02, 0.0, 0.02};
  const double h = 2e-3;
  const double eps = 4e-3;
  auto disc = Discretization::build({box, {}}, h, eps);
  const auto op = std::make_shared<const NonlocalOperator>(disc, material_preset("nu0245", eps));
  const auto sol = smooth_manufactured(box, 1e-6, 2 * std::numbers::pi * 2.5e5);
  const BodyForce body = manufactured_body_force(op, sol);
  const double T = 1e-6;
  std::vector<double> errors;
  for (double dt : {4e-9, 2e-9, 1e-9}) {
    Integrator integ(*op, {}, body, dt, manufactured_initial_state(disc->grid, sol));
    integ.advance(static_cast<std::size_t>(std::llround(T / dt)));
    FieldState exact = manufactured_initial_state(disc->grid, sol);
    for (std::size_t i = 0; i < op->size(); ++i) {
      exact.u[i] = sol.u(disc->grid.coord(i), T);
      exact.v[i] = sol.v(disc->grid.coord(i), T);
    }
    errors.push_back(state_difference(integ.state(), disc->grid, exact, disc->grid));
  }
  for (std::size_t k = 0; k + 1 < errors.size(); ++k)
    EXPECT_NEAR(errors[k] / errors[k + 1], 2.0, 0.25) << k;
}

TEST(Studies, SpatialRateOfSyntheticRunner) {
  const Rect box{0.0, 1.0, 0.0, 1.0};
  const StudyRunner runner = [&](double h, double, std::span<const double> times) {
    StudyRun r;
    r.disc = Discretization::build({box, {}}, h, 2 * h);
    for (double t : times) {
      FieldState s = FieldState::zeros(r.disc->grid.size());
      s.t = t;
      for (auto &u : s.u)
        u.x = (1.0 + t) * h * h;
      r.states.push_back(s);
    }
    return r;
  };
  const double hs[] = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  const double times[] = {0.0, 1.0};
  const auto study = spatial_convergence_study(runner, 0.1, hs, 0.01, times);
  ASSERT_EQ(study.rows.size(), 2u);
  EXPECT_EQ(study.nodes[0], 81u);
  for (const auto &row : study.rows) {
    EXPECT_TRUE(row.rate_defined);
    EXPECT_NEAR(row.rate, 2.0, 1e-9);
  }
  const double bad[] = {1.0 / 8, 1.0 / 12, 1.0 / 32};
  EXPECT_THROW(spatial_convergence_study(runner, 0.1, bad, 0.01, times),
               UnsupportedConfiguration);
}

TEST(Studies, TemporalOrderOfSyntheticRunner) {
  const Rect box{0.0, 1.0, 0.0, 1.0};
  const StudyRunner runner = [&](double h, double dt, std::span<const double> times) {
    StudyRun r;
    r.disc = Discretization::build({box, {}}, h, 2 * h);
    FieldState s = FieldState::zeros(r.disc->grid.size());
    s.t = times[0];
    for (auto &v : s.v)
      v.y = 3.0 * dt;
    r.states.push_back(s);
    return r;
  };
  const double dts[] = {4e-9, 2e-9, 1e-9};
  const auto study = temporal_convergence_study(runner, 0.25, dts, 1.25e-10, 1e-6);
  ASSERT_TRUE(study.order_defined);
  EXPECT_NEAR(study.rows[0].error, 3.0 * (4e-9 - 1.25e-10), 1e-20);
  std::vector<double> errs;
  for (double dt : dts)
    errs.push_back(3.0 * (dt - 1.25e-10));
  EXPECT_NEAR(study.fitted_order, log_log_slope(dts, errs), 1e-9);
  EXPECT_NEAR(study.rows[1].order, std::log2(errs[0] / errs[1]), 1e-9);
  EXPECT_THROW(temporal_convergence_study(runner, 0.25, dts, 5e-10, 1e-6), DomainError);
}

TEST(Projection, ConstantHasNoError) {
  ProjectionField c;
  c.kind = ProjectionField::Kind::Constant;
  c.constant = 2.0;
  EXPECT_NEAR(projection_error(c, 1.0 / 16), 0.0, 1e-7);
}

TEST(Projection, LinearErrorMatchesClosedForm) {
  ProjectionField lin;
  for (double h : {1.0 / 4, 1.0 / 16}) {
    // (1/h - 1) interior cells of width h and two boundary cells of width h/2.
    const double e2 = (1.0 / h - 1.0) * h * h * h / 12.0 + 2.0 * std::pow(0.5 * h, 3) / 12.0;
    EXPECT_NEAR(projection_error(lin, h), std::sqrt(e2), 1e-9);
  }
}

TEST(Projection, WeierstrassIntegralMatchesQuadrature) {
  ProjectionField w;
  w.kind = ProjectionField::Kind::Weierstrass;
  w.gamma = 0.5;
  w.terms = 8;
  const int n = 200000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k)
    sum += w((k + 0.5) / n * 0.3 + 0.1);
  EXPECT_NEAR(w.integral(0.1, 0.4), sum * 0.3 / n, 1e-6);
  EXPECT_GT(w.seminorm(), 1.0);
}

TEST(Projection, SuitePassesForHalfAndOne) {
  const double gammas[] = {0.5, 1.0};
  const double hs[] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  const auto r = projection_error_suite(gammas, hs);
  ASSERT_EQ(r.cases.size(), 2u);
  for (const auto &c : r.cases) {
    EXPECT_TRUE(c.bound_ok) << c.name;
    EXPECT_NEAR(c.fitted_exponent, c.gamma, 0.1) << c.name;
  }
  EXPECT_TRUE(r.ok);
}

TEST(Lipschitz, RatioStaysBelowOne) {
  const double h = 1e-3;
  for (auto mode : {BoundaryWeightMode::Indicator, BoundaryWeightMode::LinearTaper}) {
    const auto r = lipschitz_l2_suite(material_preset("nu0245", 4 * h), 12, h, 6, 77, mode);
    EXPECT_EQ(r.ratios.size(), 6u);
    EXPECT_GT(r.max_ratio, 0.0);
    EXPECT_LE(r.max_ratio, 1.0);
    EXPECT_TRUE(r.ok);
    EXPECT_GT(r.l3, 0.0);
  }
}
