#include "sticky/solve.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace sticky;
using Vec = Eigen::VectorXd;

double zero(double) { return 0.0; }
double one(double) { return 1.0; }

DiffusionSpec<double> model1(double r = 1.0) { return sticky_ou_spec(sticky_ou_preset(1), r); }

const EngineOptions kDense{Engine::Dense, {}};

TEST(NodeIndex, ExactNodesOnly) {
  const auto grid = build_uniform(0.0, 1.0, 99);
  EXPECT_EQ(node_index(grid, grid.point(37)), 37);
  try {
    node_index(grid, 0.333);
    FAIL() << "expected OffGridError";
  } catch (const OffGridError& e) {
    EXPECT_NE(std::string(e.what()).find("build_with_node"), std::string::npos);
  }
}

TEST(FeynmanKac, ZeroMaturityReturnsPayoff) {
  const auto gen = build_generator(model1(), build_uniform(0.0, 1.0, 200), Scheme::Scheme2);
  const auto u = bond_prices(gen, 0.0);
  EXPECT_EQ(u.values, Vec::Ones(201));
  EXPECT_EQ(u.payoff, "unit");
  EXPECT_EQ(u.method, "extrap");
  EXPECT_EQ(u.scheme, Scheme::Scheme2);
}

TEST(FeynmanKac, ConstantKillingFactorsOut) {
  // G = G_0 - c I commutes with G_0, so u = exp(-c t) u_0 exactly.
  const double c = 0.07, t = 2.0;
  const DiffusionSpec<double> killed([](double x) { return 0.1 - x; }, [](double) { return 0.2; },
                                     [c](double) { return c; }, Stickiness<double>::finite(0.3), 0.0, 1.0);
  const auto grid = build_uniform(0.0, 1.0, 100);
  const auto u = bond_prices(build_generator(killed, grid, Scheme::Scheme2), t, kDense);
  const auto u0 = bond_prices(build_generator(killed.without_killing(), grid, Scheme::Scheme2), t, kDense);
  EXPECT_LT((u.values - std::exp(-c * t) * u0.values).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(FeynmanKac, FunctionAndVectorPayoffsAgree) {
  const auto gen = build_generator(model1(), build_uniform(0.0, 1.0, 200), Scheme::Scheme2);
  const auto& grid = gen.require_grid();
  Vec f(gen.size());
  for (Index i = 0; i < gen.size(); ++i) f[i] = grid.point(i) * grid.point(i);
  const auto a = feynman_kac(gen, f, 1.0, kDense);
  const auto b = feynman_kac<double>(gen, [](double x) { return x * x; }, 1.0, kDense, "square");
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(b.payoff, "square");
  EXPECT_EQ(b.method, "dense");
  EXPECT_THROW(feynman_kac(gen, Vec::Ones(5).eval(), 1.0), InvalidArgument);
  Vec nan = Vec::Ones(gen.size());
  nan[3] = std::nan("");
  EXPECT_THROW(feynman_kac(gen, nan, 1.0), InvalidArgument);
}

TEST(BondPrices, BoundedAndDecreasingInMaturity) {
  const auto gen = build_generator(model1(), build_uniform(0.0, 1.0, 200), Scheme::Scheme2);
  Vec prev = Vec::Ones(gen.size());
  for (double t : {0.5, 1.0, 5.0, 10.0}) {
    const Vec u = bond_prices(gen, t, kDense).values;
    EXPECT_GT(u.minCoeff(), 0.0);
    EXPECT_TRUE((u.array() < prev.array()).all()) << "t = " << t;
    prev = u;
  }
}

TEST(BondPrices, HigherRateLowerPrice) {
  const auto gen = build_generator(model1(), build_uniform(0.0, 1.0, 200), Scheme::Scheme2);
  const Vec u = bond_prices(gen, 5.0, kDense).values;
  for (Index i = 1; i < 120; ++i) EXPECT_LT(u[i], u[i - 1]);
}

TEST(Transition, ColumnsSumToSurvival) {
  const auto gen = build_generator(model1(0.4), build_uniform(0.0, 0.4, 60), Scheme::Scheme2);
  Vec total = Vec::Zero(gen.size());
  for (Index j = 0; j < gen.size(); ++j) total += transition_column(gen, 1.0, j, kDense);
  EXPECT_LT((total - bond_prices(gen, 1.0, kDense).values).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Transition, BoundaryMassAndDensity) {
  const auto gen = build_generator(model1(0.4), build_uniform(0.0, 0.4, 60), Scheme::Scheme2);
  const auto& grid = gen.require_grid();
  const double mass = transition_mass_at_boundary(gen, 1.0, 10, kDense);
  EXPECT_GT(mass, 0.0);
  EXPECT_LT(mass, 1.0);
  EXPECT_NEAR(mass, expm_dense(gen, 1.0)(10, 0), 1e-15);
  EXPECT_NEAR(density(gen, 1.0, 10, 20, kDense), expm_dense(gen, 1.0)(10, 20) / grid.delta_avg(20), 1e-12);
  EXPECT_THROW(density(gen, 1.0, 10, 0, kDense), InvalidArgument);
  EXPECT_THROW(transition_column(gen, 0.0, 3, kDense), InvalidArgument);
  EXPECT_THROW(transition_mass_at_boundary(gen, 1.0, 61, kDense), InvalidArgument);
}

TEST(Transition, StickyAtomAppearsAtBoundary) {
  // Less stickiness, longer holding at l: the mass at x_0 grows as rho falls.
  auto lo = sticky_ou_preset(1);
  auto hi = lo;
  lo.rho = 1e-3;
  hi.rho = 1e-1;
  const auto grid = build_uniform(0.0, 0.4, 80);
  const auto g_lo = build_generator(sticky_ou_spec(lo, 0.4), grid, Scheme::Scheme2);
  const auto g_hi = build_generator(sticky_ou_spec(hi, 0.4), grid, Scheme::Scheme2);
  EXPECT_GT(transition_mass_at_boundary(g_lo, 1.0, 0, kDense), transition_mass_at_boundary(g_hi, 1.0, 0, kDense));
}

// Brownian motion reflected at 0 and passing level 1 from x:
// P(tau > t) = sum_k 4 (-1)^k / a_k cos(a_k x / 2) exp(-a_k^2 t / 8), a_k = (2k + 1) pi.
double reflected_bm_survival(double x, double t) {
  double s = 0;
  for (int k = 0; k < 200; ++k) {
    const double a = (2 * k + 1) * M_PI;
    s += 4 * (k % 2 ? -1.0 : 1.0) / a * std::cos(a * x / 2) * std::exp(-a * a * t / 8);
  }
  return s;
}

TEST(FirstPassage, ReflectedBrownianSeries) {
  const DiffusionSpec<double> bm(zero, one, zero, Stickiness<double>::reflecting(), 0.0, 2.0);
  double prev_err = 1.0;
  for (Index n : {199, 399, 799}) {
    const auto grid = build_uniform(0.0, 2.0, n);
    const double err =
        std::abs(first_passage_survival(bm, grid, 1.0, 0.3, 0.5, Scheme::Scheme2, kDense) - reflected_bm_survival(0.5, 0.3));
    EXPECT_LT(err, prev_err / 3.0) << "n = " << n;
    prev_err = err;
  }
  EXPECT_LT(prev_err, 1e-6);
}

TEST(FirstPassage, ProbabilityProperties) {
  const auto spec = model1();
  const auto grid = build_with_nodes(0.0, 1.0, 200, std::vector<double>{0.15, 0.05});
  double prev = 1.0;
  for (double t : {0.0, 0.5, 1.0, 5.0}) {
    const double s = first_passage_survival(spec, grid, 0.15, t, 0.05, Scheme::Scheme2, kDense);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, prev);
    prev = s;
  }
  EXPECT_EQ(first_passage_survival(spec, grid, 0.15, 0.0, 0.05, Scheme::Scheme2, kDense), 1.0);
}

TEST(FirstPassage, IgnoresKilling) {
  const auto grid = build_with_nodes(0.0, 1.0, 200, std::vector<double>{0.15, 0.05});
  const double a = first_passage_survival(model1(), grid, 0.15, 1.0, 0.05, Scheme::Scheme2, kDense);
  const double b = first_passage_survival(model1().without_killing(), grid, 0.15, 1.0, 0.05, Scheme::Scheme2, kDense);
  EXPECT_EQ(a, b);
}

TEST(FirstPassage, HigherLevelSurvivesLonger) {
  const auto grid = build_with_nodes(0.0, 1.0, 200, std::vector<double>{0.1, 0.2, 0.05});
  const double near = first_passage_survival(model1(), grid, 0.1, 1.0, 0.05, Scheme::Scheme2, kDense);
  const double far = first_passage_survival(model1(), grid, 0.2, 1.0, 0.05, Scheme::Scheme2, kDense);
  EXPECT_LT(near, far);
}

TEST(FirstPassage, RejectsBadStates) {
  const auto grid = build_uniform(0.0, 1.0, 99);
  EXPECT_THROW(first_passage_survival(model1(), grid, 0.333, 1.0, 0.0, Scheme::Scheme2), OffGridError);
  EXPECT_THROW(first_passage_survival(model1(), grid, grid.point(10), 1.0, grid.point(10), Scheme::Scheme2),
               InvalidArgument);
  EXPECT_THROW(first_passage_survival(model1(), grid, grid.point(10), -1.0, 0.0, Scheme::Scheme2), InvalidArgument);
  EXPECT_THROW(first_passage_survival(model1(), grid, grid.point(1), 1.0, 0.0, Scheme::Scheme2), InvalidArgument);
}

}  // namespace
