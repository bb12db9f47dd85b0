#include "sticky/measures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace sticky;

DiffusionSpec<double> model1(double r = 1.0) { return sticky_ou_spec(sticky_ou_preset(1), r); }

TEST(Measure, SymmetrizesModel1) {
  const auto gen = build_generator(model1(), build_uniform(0.0, 1.0, 200), Scheme::Scheme2);
  const auto meas = build_measure(model1(), gen);
  EXPECT_LT(symmetry_residual(meas, gen), 1e-12);
  const auto gen1 = build_generator(model1(), build_uniform(0.0, 1.0, 200), Scheme::Scheme1);
  EXPECT_LT(symmetry_residual(build_measure(gen1), gen1), 1e-12);
}

TEST(Measure, BoundaryMassScheme2) {
  // d+x_0 = 0.01 on [0, 0.5] with 49 interior points.
  const auto grid = build_uniform(0.0, 0.5, 49);
  ASSERT_NEAR(grid.delta_plus(0), 0.01, 1e-15);
  const auto gen = build_generator(model1(0.5), grid, Scheme::Scheme2);
  const auto meas = build_measure(gen);
  EXPECT_NEAR(meas.M0, 250.0 * std::exp(0.016), 1e-10);
  EXPECT_EQ(meas.alpha, 0.004);
  EXPECT_NEAR(meas.s_inv[0], 0.004 * meas.M0, 1e-14);
}

TEST(Measure, BoundaryMassScheme1) {
  const auto grid = build_uniform(0.0, 0.5, 49);
  const auto gen = build_generator(model1(0.5), grid, Scheme::Scheme1);
  const auto meas = build_measure(gen);
  EXPECT_NEAR(meas.M0, 250.0 * std::exp(0.045 * 0.01 / 0.0025), 1e-10);
  EXPECT_NEAR(meas.s_inv[0], 0.004 * meas.M0, 1e-14);
}

TEST(Measure, FirstSpeedDensity) {
  const auto grid = build_uniform(0.0, 0.5, 49);
  const auto gen = build_generator(model1(0.5), grid, Scheme::Scheme2);
  const auto meas = build_measure(gen);
  const double mu1 = 0.45 * (0.1 - grid.point(1));
  const double expected = meas.M0 * gen.beta * 2 * 0.004 / (-mu1 * 0.01 + 0.05 * 0.05);
  EXPECT_NEAR(meas.m[1], expected, 1e-12 * expected);
  EXPECT_NEAR(meas.weights[1], meas.m[1] * grid.delta_avg(1), 1e-12 * meas.weights[1]);
}

TEST(Measure, ConstantDensityWithoutDrift) {
  const DiffusionSpec<double> spec([](double) { return 0.0; }, [](double) { return 0.3; },
                                   [](double) { return 0.0; }, Stickiness<double>::finite(0.5), 0.0, 1.0);
  const auto gen = build_generator(spec, build_uniform(0.0, 1.0, 50), Scheme::Scheme1);
  const auto meas = build_measure(gen);
  for (Index i = 2; i <= 50; ++i) EXPECT_NEAR(meas.m[i], meas.m[1], 1e-12 * meas.m[1]);
}

TEST(Measure, AllPositive) {
  const auto gen = build_generator(model1(), build_uniform(0.0, 1.0, 400), Scheme::Scheme2);
  const auto meas = build_measure(gen);
  EXPECT_GT(meas.weights.minCoeff(), 0.0);
  EXPECT_GT(meas.s_inv.minCoeff(), 0.0);
  EXPECT_GT(meas.m.tail(400).minCoeff(), 0.0);
}

TEST(Measure, RiemannConsistency) {
  // Continuous speed density with s(0) = 1:
  // m(x) = (2 / sigma^2) exp((2 kappa / sigma^2)(theta x - x^2 / 2)).
  const double kappa = 0.45, theta = 0.1, s2 = 0.0025;
  auto m = [&](double x) { return 2.0 / s2 * std::exp(2 * kappa / s2 * (theta * x - x * x / 2)); };
  const int panels = 200000;
  double simpson = m(0.0) + m(1.0);
  for (int k = 1; k < panels; ++k) simpson += (k % 2 ? 4.0 : 2.0) * m(double(k) / panels);
  simpson /= 3.0 * panels;

  auto discrete = [&](Index n) {
    const auto gen = build_generator(model1(), build_uniform(0.0, 1.0, n), Scheme::Scheme2);
    const auto meas = build_measure(gen);
    return meas.weights.tail(n).sum();
  };
  // First order once past the sign change of the error near n = 400.
  const double e1600 = std::abs(discrete(1600) - simpson) / simpson;
  const double e3200 = std::abs(discrete(3200) - simpson) / simpson;
  const double e6400 = std::abs(discrete(6400) - simpson) / simpson;
  EXPECT_LT(e1600, 1e-3);
  EXPECT_LT(e3200, 0.6 * e1600);
  EXPECT_LT(e6400, 0.6 * e3200);
}

TEST(Measure, BoundaryAtomTendsToOneOverRho) {
  double prev = 1e300;
  for (Index n : {200, 800, 3200}) {
    const auto gen = build_generator(model1(), build_uniform(0.0, 1.0, n), Scheme::Scheme2);
    const double gap = std::abs(build_measure(gen).M0 * 0.004 - 1.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Measure, RefusesAbsorbingAndNegativeRates) {
  auto p = sticky_ou_preset(1);
  p.rho = 0;
  const auto gen0 = build_generator(sticky_ou_spec(p, 1.0), build_uniform(0.0, 1.0, 200), Scheme::Scheme2);
  EXPECT_THROW(build_measure(gen0), SymmetrizationError);

  GeneratorOptions o;
  o.allow_negative_rates = true;
  const auto genneg = build_generator(model1(), build_uniform(0.0, 1.0, 99), Scheme::Scheme2, o);
  EXPECT_THROW(build_measure(genneg), NegativeRateError);
}

TEST(Measure, ReflectingLimitSymmetrizes) {
  const auto spec = model1().with_stickiness(Stickiness<double>::reflecting());
  const auto gen = build_generator(spec, build_uniform(0.0, 1.0, 200), Scheme::Scheme2);
  const auto meas = build_measure(gen);
  EXPECT_EQ(meas.M0, 1.0);
  EXPECT_LT(symmetry_residual(meas, gen), 1e-12);
}

TEST(InnerProduct, PositiveSymmetricAndAtom) {
  const auto gen = build_generator(model1(), build_uniform(0.0, 1.0, 200), Scheme::Scheme2);
  const auto meas = build_measure(gen);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Eigen::VectorXd f(gen.size()), g(gen.size());
  for (Index i = 0; i < gen.size(); ++i) {
    f[i] = nd(rng);
    g[i] = nd(rng);
  }
  EXPECT_GT(inner_product(meas, f, f), 0.0);
  EXPECT_EQ(inner_product(meas, Eigen::VectorXd::Zero(gen.size()), Eigen::VectorXd::Zero(gen.size())), 0.0);
  EXPECT_NEAR(inner_product(meas, f, g), inner_product(meas, g, f), 1e-12 * std::abs(inner_product(meas, f, g)));
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(gen.size());
  e0[0] = 1.0;
  EXPECT_EQ(inner_product(meas, e0, e0), meas.M0);
  EXPECT_THROW(inner_product(meas, f.head(10), g.head(10)), InvalidArgument);
}

}  // namespace
