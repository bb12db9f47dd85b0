#include "sticky/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace sticky;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

double zero(double) { return 0.0; }
double one(double) { return 1.0; }

// Brownian motion reflected at 0 and killed at 1: -G has eigenvalues
// ((k - 1/2) pi)^2 / 2 with eigenfunctions cos((k - 1/2) pi x).
DiffusionSpec<double> reflected_bm() { return {zero, one, zero, Stickiness<double>::reflecting(), 0.0, 1.0}; }

struct Chain {
  GeneratorMatrix<double> gen;
  DiscreteMeasure<double> meas;
  SpectralDecomposition<double> dec;
};

Chain localized_model1(Index n = 100) {
  const auto gen = build_generator(sticky_ou_spec(sticky_ou_preset(1), 0.4), build_uniform(0.0, 0.4, n),
                                   Scheme::Scheme2);
  const auto meas = build_measure(gen);
  return {gen, meas, decompose(gen, meas)};
}

TEST(Decompose, ReflectedBrownianEigenvalues) {
  const auto gen = build_generator(reflected_bm(), build_uniform(0.0, 1.0, 400), Scheme::Scheme2);
  const auto meas = build_measure(gen);
  const auto dec = decompose(gen, meas);
  for (Index k = 1; k <= 5; ++k) {
    const double exact = 0.5 * std::pow((double(k) - 0.5) * M_PI, 2);
    EXPECT_NEAR(dec.eigenvalues[k - 1] / exact, 1.0, 2e-4) << "k = " << k;
  }
  EXPECT_NEAR(eigenvalue_growth_slope(dec, 20, 60), 2.0, 0.05);
}

TEST(Decompose, ReflectedBrownianEigenfunction) {
  const auto gen = build_generator(reflected_bm(), build_uniform(0.0, 1.0, 400), Scheme::Scheme2);
  const auto meas = build_measure(gen);
  const auto dec = decompose(gen, meas);
  const auto& grid = gen.require_grid();
  // Normalized in the discrete L2(M_n); compare shapes after scaling at x_0.
  const Vec phi = dec.eigenfunctions.col(0) / dec.eigenfunctions(0, 0);
  for (Index i = 0; i < gen.size(); i += 40)
    EXPECT_NEAR(phi[i], std::cos(M_PI / 2 * grid.point(i)), 1e-4) << "i = " << i;
}

TEST(Decompose, OrthonormalInDiscreteMeasure) {
  const auto c = localized_model1();
  EXPECT_LT(orthonormality_residual(c.dec, c.meas), 1e-10);
}

TEST(Decompose, EigenEquationHolds) {
  const auto c = localized_model1();
  const Mat g = c.gen.dense();
  for (Index k = 0; k < c.dec.size(); k += 10) {
    const Vec phi = c.dec.eigenfunctions.col(k);
    const Vec res = g * phi + c.dec.eigenvalues[k] * phi;
    EXPECT_LT(res.cwiseAbs().maxCoeff(), 1e-8 * (1 + c.dec.eigenvalues[k]) * phi.cwiseAbs().maxCoeff()) << k;
  }
}

TEST(Decompose, OrderedPositiveAndSigned) {
  const auto c = localized_model1();
  EXPECT_TRUE(spectrum_is_ordered(c.dec));
  EXPECT_GT(c.dec.eigenvalues[0], 0.0);
  for (Index k = 0; k < c.dec.size(); ++k) EXPECT_GE(c.dec.eigenfunctions(0, k), 0.0);
  // The ground state does not change sign.
  EXPECT_GT(c.dec.eigenfunctions.col(0).minCoeff(), 0.0);
}

TEST(Decompose, OrderingCheckRejectsBadSpectra) {
  SpectralDecomposition<double> dec;
  dec.eigenvalues = Vec(3);
  dec.eigenvalues << 0.0, 2.0, 1.0;
  EXPECT_FALSE(spectrum_is_ordered(dec));
  dec.eigenvalues << -1e-9, 1.0, 2.0;
  EXPECT_FALSE(spectrum_is_ordered(dec));
  EXPECT_TRUE(spectrum_is_ordered(dec, 1e-8));
}

TEST(Expansion, KernelMatchesDenseExponential) {
  const auto c = localized_model1();
  for (double t : {0.05, 1.0, 5.0}) {
    const Mat p = expm_dense(c.gen, t);
    EXPECT_LT((expansion_kernel(c.dec, c.meas, t) - p).cwiseAbs().maxCoeff(), 1e-9) << "t = " << t;
    EXPECT_NEAR(kernel_via_expansion(c.dec, c.meas, t, 3, 0), p(3, 0), 1e-10);
    EXPECT_NEAR(kernel_via_expansion(c.dec, c.meas, t, 0, 40), p(0, 40), 1e-10);
  }
}

TEST(Expansion, DensityDividesByCellWidth) {
  const auto c = localized_model1();
  const auto& grid = c.gen.require_grid();
  const double p = kernel_via_expansion(c.dec, c.meas, 1.0, 20, 30);
  EXPECT_DOUBLE_EQ(density_via_expansion(c.dec, c.meas, 1.0, 20, 30, grid), p / grid.delta_avg(30));
  EXPECT_THROW(density_via_expansion(c.dec, c.meas, 1.0, 20, 0, grid), InvalidArgument);
}

TEST(Expansion, RejectsBadArguments) {
  const auto c = localized_model1(40);
  EXPECT_THROW(kernel_via_expansion(c.dec, c.meas, 0.0, 1, 1), InvalidArgument);
  EXPECT_THROW(kernel_via_expansion(c.dec, c.meas, 1.0, 1, 41), InvalidArgument);
  EXPECT_THROW(expansion_kernel(c.dec, c.meas, -1.0), InvalidArgument);
  EXPECT_THROW(eigenvalue_growth_slope(c.dec, 0, 5), InvalidArgument);
  EXPECT_THROW(eigenvalue_growth_slope(c.dec, 5, 42), InvalidArgument);
}

TEST(Decompose, RefusesAbsorbingBoundary) {
  auto p = sticky_ou_preset(1);
  p.rho = 0.0;
  const auto gen = build_generator(sticky_ou_spec(p, 0.4), build_uniform(0.0, 0.4, 50), Scheme::Scheme2);
  EXPECT_THROW(decompose(gen, build_measure(gen)), SymmetrizationError);
}

TEST(Decompose, RefusesMismatchedMeasure) {
  const auto c = localized_model1(40);
  auto bad = c.meas;
  bad.weights[5] *= 1.1;
  bad.log_weights[5] = std::log(bad.weights[5]);
  EXPECT_THROW(decompose(c.gen, bad), SymmetrizationError);
}

}  // namespace
