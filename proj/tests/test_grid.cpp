#include "sticky/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace {

using sticky::Grid;
using sticky::Index;
using sticky::InvalidArgument;

constexpr double kEps = std::numeric_limits<double>::epsilon();

void expect_consistent(const Grid<double>& g) {
  const auto& x = g.points();
  double total = 0;
  for (Index i = 0; i + 1 < g.size(); ++i) {
    EXPECT_LT(x[i], x[i + 1]);
    EXPECT_EQ(g.delta_plus(i), x[i + 1] - x[i]);
    total += g.delta_plus(i);
  }
  for (Index i = 1; i <= g.interior_count(); ++i) {
    EXPECT_EQ(g.delta_minus(i), x[i] - x[i - 1]);
    EXPECT_EQ(g.delta_avg(i), (g.delta_plus(i) + g.delta_minus(i)) / 2);
  }
  EXPECT_NEAR(total, g.right() - g.left(), double(g.interior_count() + 1) * kEps);
  EXPECT_LE(g.spacing_ratio(), g.ratio_bound());
}

TEST(BuildUniform, HundredOnePoints) {
  const auto g = sticky::build_uniform(0.0, 1.0, 99);
  EXPECT_EQ(g.size(), 101);
  EXPECT_EQ(g.interior_count(), 99);
  for (Index i = 0; i <= 99; ++i) EXPECT_NEAR(g.delta_plus(i), 0.01, 1e-15);
  EXPECT_EQ(g.left(), 0.0);
  EXPECT_EQ(g.right(), 1.0);
  expect_consistent(g);
}

TEST(BuildUniform, RejectsDegenerate) {
  EXPECT_THROW(sticky::build_uniform(0.0, 1.0, 1), InvalidArgument);
  EXPECT_THROW(sticky::build_uniform(1.0, 1.0, 10), InvalidArgument);
  EXPECT_THROW(sticky::build_uniform(1.0, 0.0, 10), InvalidArgument);
}

TEST(BuildUniform, Mesh) {
  const auto g = sticky::build_uniform(0.0, 1.0, 199);
  EXPECT_NEAR(g.mesh(), 0.005, 1e-15);
  expect_consistent(g);
}

TEST(Grid, EndSpacings) {
  const auto g = sticky::build_uniform(0.0, 1.0, 9);
  EXPECT_EQ(g.delta_minus(0), 0.0);
  EXPECT_EQ(g.delta_plus(g.size() - 1), 0.0);
}

TEST(Grid, RatioBoundEnforced) {
  Eigen::VectorXd x(4);
  x << 0.0, 0.01, 0.5, 1.0;
  EXPECT_THROW(Grid<double>{x}, InvalidArgument);
  EXPECT_NO_THROW((Grid<double>{x, 100.0}));
  Eigen::VectorXd y(4);
  y << 0.0, 0.5, 0.5, 1.0;
  EXPECT_THROW(Grid<double>{y}, InvalidArgument);
}

TEST(MidpointAnchor, BracketsAreEquidistant) {
  const double xi = 0.305;
  const auto g = sticky::build_with_midpoint_anchor(0.0, 1.0, 100, xi);
  const Index k = g.cell_of(xi);
  EXPECT_NEAR((g.point(k) + g.point(k + 1)) / 2, xi, 4 * kEps);
  expect_consistent(g);
}

TEST(MidpointAnchor, ExistingMidpointLeavesGridUnchanged) {
  const auto u = sticky::build_uniform(0.0, 1.0, 99);
  const double xi = (u.point(30) + u.point(31)) / 2;
  const auto g = sticky::build_with_midpoint_anchor(0.0, 1.0, 99, xi);
  EXPECT_EQ(g.points(), u.points());
}

TEST(MidpointAnchor, RatioBoundHoldsNearNode) {
  const double xi = 0.30501;
  const auto g = sticky::build_with_midpoint_anchor(0.0, 1.0, 100, xi);
  EXPECT_LE(g.spacing_ratio(), 10.0);
  const Index k = g.cell_of(xi);
  EXPECT_NEAR((g.point(k) + g.point(k + 1)) / 2, xi, 4 * kEps);
  expect_consistent(g);
}

TEST(MidpointAnchor, EndCells) {
  const auto lo = sticky::build_with_midpoint_anchor(0.0, 1.0, 50, 0.004);
  EXPECT_NEAR((lo.point(0) + lo.point(1)) / 2, 0.004, 4 * kEps);
  const auto hi = sticky::build_with_midpoint_anchor(0.0, 1.0, 50, 0.995);
  const Index k = hi.cell_of(0.995);
  EXPECT_NEAR((hi.point(k) + hi.point(k + 1)) / 2, 0.995, 4 * kEps);
  EXPECT_THROW(sticky::build_with_midpoint_anchor(0.0, 1.0, 50, 1.0), InvalidArgument);
}

TEST(NodeGrid, ExistingNodeLeavesGridUnchanged) {
  const auto u = sticky::build_uniform(0.0, 1.0, 99);
  const auto g = sticky::build_with_node(0.0, 1.0, 99, 0.5);
  EXPECT_EQ(g.points(), u.points());
  EXPECT_TRUE(g.index_of(0.5).has_value());
}

TEST(NodeGrid, PlacesLevelExactly) {
  const auto g = sticky::build_with_node(0.0, 1.0, 100, 0.333);
  const auto idx = g.index_of(0.333);
  ASSERT_TRUE(idx.has_value());
  EXPECT_EQ(g.point(*idx), 0.333);
  EXPECT_EQ(g.interior_count(), 100);
  expect_consistent(g);
}

TEST(NodeGrid, MembershipIsExact) {
  const auto g = sticky::build_with_node(0.0, 1.0, 100, 0.333);
  EXPECT_FALSE(g.index_of(0.333 + 1e-12).has_value());
  EXPECT_THROW(sticky::build_with_node(0.0, 1.0, 100, 0.0), InvalidArgument);
  EXPECT_THROW(sticky::build_with_node(0.0, 1.0, 100, 1.2), InvalidArgument);
}

TEST(NodeGrid, SeveralNodes) {
  const auto g = sticky::build_with_nodes(0.0, 1.0, 200, std::vector<double>{0.3, 0.0123});
  EXPECT_TRUE(g.index_of(0.3).has_value());
  EXPECT_TRUE(g.index_of(0.0123).has_value());
  EXPECT_EQ(g.interior_count(), 200);
  expect_consistent(g);
}

}  // namespace
