#include "pdfrac/errors.hpp"
#include "pdfrac/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace pdfrac;

namespace {

std::size_t center_node(const Grid &g) {
  const Vec2 c{0.5 * (g.box().x0 + g.box().x1), 0.5 * (g.box().y0 + g.box().y1)};
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (norm(g.coord(i) - c) < norm(g.coord(best) - c))
      best = i;
  return best;
}

std::size_t find_bond(const NeighborTable &t, std::size_t i, std::size_t j) {
  for (std::size_t b = t.begin(i); b < t.end(i); ++b)
    if (t.neighbor[b] == j)
      return b;
  return t.bonds();
}

} // namespace

TEST(Grid, UnitCellHasFourNodes) {
  const double h = 1e-3;
  const Grid g = build_grid({{0.0, h, 0.0, h}, {}}, h, 4 * h);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(g.coord(0), (Vec2{0.0, 0.0}));
  EXPECT_EQ(g.coord(3), (Vec2{h, h}));
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_NEAR(g.volume(i), 0.25 * h * h, 1e-20);
}

TEST(Grid, CellsTileTheBox) {
  const Grid g({-0.0137, 0.1137, -0.008, 0.108}, 2e-3);
  double area = 0.0;
  for (double v : g.volumes())
    area += v;
  EXPECT_NEAR(area, g.box().area(), 1e-12 * g.box().area());
  EXPECT_EQ(g.x_breaks().front(), g.box().x0);
  EXPECT_EQ(g.y_breaks().back(), g.box().y1);
}

TEST(Grid, PaddedCrackDomainNodeCounts) {
  for (auto [eps, h, expected] : {std::tuple{8e-3, 4e-3, 900u}, std::tuple{8e-3, 2e-3, 3481u},
                                  std::tuple{8e-3, 1e-3, 13689u}}) {
    const Grid g = build_grid({{-eps, 0.1 + eps, -eps, 0.1 + eps}, {}}, h, eps);
    EXPECT_EQ(g.size(), expected) << "h = " << h;
  }
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(Grid({0.0, 1.0, 0.0, 1.0}, 0.0), ConfigError);
  EXPECT_THROW(build_grid({{1.0, 0.0, 0.0, 1.0}, {}}, 0.1, 0.4), ConfigError);
  EXPECT_THROW(build_grid({{0.0, 1.0, 0.0, 1.0}, {{{0.5, 0.5}, {0.5, 1.5}}}}, 0.1, 0.4),
               ConfigError);
}

TEST(Neighbors, CenterNodeEffectiveCount) {
  const double eps = 8e-3;
  const double h = 2e-3;
  const Grid g({0.0, 0.1, 0.0, 0.1}, h);
  const auto t = build_neighbors(g, eps, {});
  const std::size_t i = center_node(g);
  double effective = 0.0;
  for (std::size_t b = t.begin(i); b < t.end(i); ++b)
    effective += t.volume_fraction[b];
  EXPECT_NEAR(effective, 50.0, 0.15 * 50.0);
  for (std::size_t b = t.begin(i); b < t.end(i); ++b)
    EXPECT_LE(t.distance[b], eps + 0.5 * h + 1e-15);
}

TEST(Neighbors, PartialVolumeSumMatchesBallArea) {
  const double eps = 8e-3;
  for (double h : {eps / 4, eps / 8}) {
    const Grid g({0.0, 0.1, 0.0, 0.1}, h);
    const auto t = build_neighbors(g, eps, {});
    const std::size_t i = center_node(g);
    double area = 0.0;
    for (std::size_t b = t.begin(i); b < t.end(i); ++b)
      area += t.volume_fraction[b] * h * h;
    EXPECT_NEAR(area, std::numbers::pi * eps * eps, 0.02 * std::numbers::pi * eps * eps)
        << "h = " << h;
  }
}

TEST(Neighbors, HorizonBelowHalfSpacingGivesNoBonds) {
  const double h = 1e-3;
  const Grid g({0.0, 10 * h, 0.0, 10 * h}, h);
  const auto t = build_neighbors(g, 0.4 * h, {});
  EXPECT_EQ(t.bonds(), 0u);
  EXPECT_EQ(t.nodes(), g.size());
}

TEST(Neighbors, VolumeFractionRamp) {
  const double eps = 1.0;
  const double h = 0.2;
  EXPECT_EQ(volume_fraction(0.5, eps, h), 1.0);
  EXPECT_EQ(volume_fraction(0.9, eps, h), 1.0);
  EXPECT_NEAR(volume_fraction(1.0, eps, h), 0.5, 1e-15);
  EXPECT_NEAR(volume_fraction(1.05, eps, h), 0.25, 1e-15);
  EXPECT_EQ(volume_fraction(1.2, eps, h), 0.0);
}

TEST(Neighbors, CrackHidesBondsInBothDirections) {
  const double h = 1e-3;
  const Segment crack{{5.5 * h, 0.0}, {5.5 * h, 6 * h}};
  const DomainSpec spec{{0.0, 11 * h, 0.0, 11 * h}, {crack}};
  const Grid g = build_grid(spec, h, 3 * h);
  const auto t = build_neighbors(g, 3 * h, spec.cracks);
  const std::size_t left = g.index(5, 2);
  const std::size_t right = g.index(6, 2);
  const std::size_t above_l = g.index(5, 9);
  const std::size_t above_r = g.index(6, 9);
  EXPECT_EQ(t.visible[find_bond(t, left, right)], 0);
  EXPECT_EQ(t.visible[find_bond(t, right, left)], 0);
  EXPECT_EQ(t.visible[find_bond(t, above_l, above_r)], 1);
  EXPECT_EQ(t.visible[find_bond(t, above_r, above_l)], 1);
}

TEST(Neighbors, NodeOnCrackAttachesToOneFace) {
  const double h = 1e-3;
  const Segment crack{{5 * h, 0.0}, {5 * h, 5 * h}};
  const Vec2 on{5 * h, 2 * h};
  const Vec2 left{4 * h, 2 * h};
  const Vec2 right{6 * h, 2 * h};
  const double tol = 1e-9 * h;
  EXPECT_NE(bond_crosses_crack(on, left, crack, tol), bond_crosses_crack(on, right, crack, tol));
  EXPECT_TRUE(bond_crosses_crack(left, right, crack, tol));
  EXPECT_FALSE(bond_crosses_crack(left, left + Vec2{0.0, h}, crack, tol));
  EXPECT_FALSE(bond_crosses_crack({4 * h, 6 * h}, {6 * h, 6 * h}, crack, tol));
}

TEST(Neighbors, SymmetryInvariantsOverRandomConfigs) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double h = 1e-3;
    const double eps = h * (1.0 + 4.0 * unit(rng));
    const double w = h * (4.0 + 10.0 * unit(rng));
    const double ht = h * (4.0 + 10.0 * unit(rng));
    DomainSpec spec{{0.0, w, 0.0, ht}, {}};
    if (trial % 2 == 0)
      spec.cracks.push_back({{w * unit(rng), ht * unit(rng)}, {w * unit(rng), ht * unit(rng)}});
    const Grid g = build_grid(spec, h, eps);
    const auto t = build_neighbors(g, eps, spec.cracks);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t b = t.begin(i); b < t.end(i); ++b) {
        const std::size_t j = t.neighbor[b];
        ASSERT_NE(j, i);
        if (b > t.begin(i))
          ASSERT_LT(t.neighbor[b - 1], j);
        const std::size_t r = find_bond(t, j, i);
        ASSERT_LT(r, t.bonds()) << "trial " << trial;
        EXPECT_EQ(t.distance[b], t.distance[r]);
        EXPECT_EQ(t.volume_fraction[b], t.volume_fraction[r]);
        EXPECT_EQ(t.visible[b], t.visible[r]) << "trial " << trial;
        EXPECT_EQ(t.direction[b], -t.direction[r]);
      }
  }
}

TEST(Neighbors, BinnedSearchMatchesAllPairs) {
  const double h = 1e-3;
  for (double eps : {0.7 * h, 2 * h, 4.3 * h, 25 * h}) {
    const DomainSpec spec{{-0.3 * h, 17.2 * h, 0.0, 13 * h}, {{{8.5 * h, 0.0}, {8.5 * h, 6 * h}}}};
    const Grid g = build_grid(spec, h, eps);
    EXPECT_EQ(build_neighbors(g, eps, spec.cracks), build_neighbors_all_pairs(g, eps, spec.cracks))
        << "eps = " << eps;
  }
}

TEST(Neighbors, CacheRoundTrip) {
  const double h = 1e-3;
  const DomainSpec spec{{0.0, 12 * h, 0.0, 12 * h}, {}};
  const Grid g = build_grid(spec, h, 3 * h);
  const auto t = build_neighbors(g, 3 * h, {});
  const auto key = neighbor_cache_key(spec, h, 3 * h);
  const auto path = std::filesystem::temp_directory_path() / "pdfrac_cache_test.bin";
  save_neighbor_table(path, key, t);
  NeighborTable loaded;
  ASSERT_TRUE(load_neighbor_table(path, key, loaded));
  EXPECT_EQ(loaded, t);
  EXPECT_FALSE(load_neighbor_table(path, neighbor_cache_key(spec, h, 4 * h), loaded));
  EXPECT_FALSE(load_neighbor_table(path.string() + ".missing", key, loaded));
  std::filesystem::remove(path);
}

TEST(BoundaryWeight, TaperValues) {
  const double eps = 4e-3;
  const double h = 1e-3;
  const DomainSpec spec{{0.0, 0.02, 0.0, 0.02}, {}};
  const Grid g = build_grid(spec, h, eps);
  const auto w = boundary_weight(g, spec, BoundaryWeightMode::LinearTaper, eps);
  EXPECT_EQ(w[center_node(g)], 1.0);
  EXPECT_EQ(w[g.index(0, 10)], 0.0);
  EXPECT_DOUBLE_EQ(w[g.index(2, 10)], 0.5);
  for (double v : boundary_weight(g, spec, BoundaryWeightMode::Indicator, eps))
    EXPECT_EQ(v, 1.0);
}

TEST(Projection, ConstantFieldIsReproduced) {
  const Grid g({0.0, 1.0, 0.0, 1.0}, 1.0 / 16);
  for (double v : project_to_cells([](const Vec2 &) { return 3.25; }, g))
    EXPECT_NEAR(v, 3.25, 1e-14);
}

TEST(Projection, LinearFieldAveragesToCellMidpoint) {
  const double h = 0.1;
  // One cell [h/2, 3h/2]; shifting the field makes it the cell [0, h].
  const Grid g({0.5 * h, 1.5 * h, 0.0, 1.0}, h);
  const auto avg = project_to_cells([h](const Vec2 &p) { return p.x - 0.5 * h; }, g);
  EXPECT_NEAR(avg[0], 0.5 * h, 1e-15);
  const Grid full({0.0, 1.0, 0.0, 1.0}, h);
  const auto a = project_to_cells([](const Vec2 &p) { return p.x; }, full);
  EXPECT_NEAR(a[full.index(3, 4)], 0.3, 1e-15);
  EXPECT_NEAR(a[full.index(0, 4)], 0.025, 1e-15); // clipped cell [0, h/2]
}

TEST(Projection, LipschitzFieldDeviationBound) {
  const double h = 1.0 / 32;
  const Grid g({0.0, 1.0, 0.0, 1.0}, h);
  auto f = [](const Vec2 &p) { return std::hypot(p.x - 0.37, p.y - 0.61); };
  const auto avg = project_to_cells(f, g, 4, 8);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = static_cast<std::size_t>(g.column(i));
    const auto r = static_cast<std::size_t>(g.row(i));
    for (double sx : {0.0, 0.5, 1.0})
      for (double sy : {0.0, 0.5, 1.0}) {
        const Vec2 p{g.x_breaks()[c] + sx * (g.x_breaks()[c + 1] - g.x_breaks()[c]),
                     g.y_breaks()[r] + sy * (g.y_breaks()[r + 1] - g.y_breaks()[r])};
        EXPECT_LE(std::abs(avg[i] - f(p)), std::sqrt(2.0) * h);
      }
  }
}
