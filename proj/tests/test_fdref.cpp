#include "sticky/fdref.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

using namespace sticky;
using Vec = Eigen::VectorXd;

TEST(CNConfig, StepCount) {
  CNConfig cfg;
  EXPECT_EQ(cfg.step_count(1.0), 60);
  EXPECT_EQ(cfg.step_count(0.25), 15);
  EXPECT_EQ(cfg.step_count(30.0), 1800);
  EXPECT_EQ(cfg.step_count(1e-6), 1);
  EXPECT_EQ((CNConfig{20}.step_count(0.5)), 120);
  EXPECT_THROW((CNConfig{0}.step_count(1.0)), InvalidArgument);
}

TEST(CrankNicolson, ScalarRecursion) {
  Vec z = Vec::Zero(1), d(1);
  d << -0.3;
  const auto gen = make_tridiagonal_generator(z, d, z);
  const double dt = 2.0 / 120.0;
  const double factor = (1 - 0.3 * dt / 2) / (1 + 0.3 * dt / 2);
  const auto u = crank_nicolson_solve(gen, Vec::Ones(1).eval(), 2.0);
  EXPECT_NEAR(u[0], std::pow(factor, 120), 1e-14);
  EXPECT_NEAR(u[0], std::exp(-0.6), 1e-5);
  EXPECT_EQ(u.method, "cn");
}

TEST(CrankNicolson, SecondOrderInTime) {
  const auto gen = build_generator(sticky_ou_spec(sticky_ou_preset(1), 0.4), build_uniform(0.0, 0.4, 100),
                                   Scheme::Scheme2);
  const Vec f = Vec::Ones(gen.size());
  const Vec ref = expm_action_dense(gen, f, 1.0);
  std::vector<double> steps, errs;
  for (int spm : {5, 10, 20, 40}) {
    steps.push_back(12.0 * spm);
    errs.push_back((crank_nicolson_solve(gen, f, 1.0, {spm}).values - ref).cwiseAbs().maxCoeff());
  }
  EXPECT_NEAR(fit_loglog(steps, errs).slope, -2.0, 0.1);
  EXPECT_LT(errs.back(), 1e-7);
}

TEST(CrankNicolson, AgreesWithExpmOnFullDomain) {
  const auto gen = build_generator(sticky_ou_spec(sticky_ou_preset(1), 1.0), build_uniform(0.0, 1.0, 400),
                                   Scheme::Scheme2);
  const Vec f = Vec::Ones(gen.size());
  const Vec ref = expm_action_dense(gen, f, 5.0);
  const Vec cn = crank_nicolson_solve(gen, f, 5.0, {20}).values;
  EXPECT_LT((cn - ref).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(CrankNicolson, RejectsBadInput) {
  Vec z = Vec::Zero(2), d(2);
  d << -1, -1;
  const auto gen = make_tridiagonal_generator(z, d, z);
  EXPECT_THROW(crank_nicolson_solve(gen, Vec::Ones(2).eval(), 0.0), InvalidArgument);
  EXPECT_THROW(crank_nicolson_solve(gen, Vec::Ones(3).eval(), 1.0), InvalidArgument);
}

}  // namespace
