#pragma once

#include "sticky/errors.hpp"
#include "sticky/generator.hpp"
#include "sticky/model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <string>

namespace sticky {

/// Discrete speed and scale quantities of the chain. `weights` are the
/// inner-product weights M_n(x_i): M_n(x_0) at i = 0 and m_n(x_i) dx_i for
/// i = 1..n. diag(weights) G_n is symmetric.
template <typename Scalar>
struct DiscreteMeasure {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar M0{};
  /// m_n(x_i) for i = 1..n; entry 0 is unused and set to zero.
  Vector m;
  Vector weights;
  Vector log_weights;
  /// 1 / s_n(x_i), i = 0..n.
  Vector s_inv;
  /// mu(x_0) for Scheme 1, rho for Scheme 2.
  Scalar alpha{};

  Index size() const noexcept { return weights.size(); }
};

/// Speed density by the telescoping product, accumulated in log space:
///
///   M_n(x_0) = exp(alpha d+x_0 / sigma^2(x_0)) / rho
///   m_n(x_1) = M_n(x_0) beta 2 rho / (-mu(x_1) d+x_1 + sigma^2(x_1))
///   m_n(x_{i+1}) = m_n(x_i) (mu(x_i) d-x_i + sigma^2(x_i))
///                           / (-mu(x_{i+1}) d+x_{i+1} + sigma^2(x_{i+1}))
///
/// For the reflecting tag rho beta is replaced by its limit G[0,1] d+x_0 and
/// M_n(x_0) is normalized to 1 (the atom 1/rho vanishes).
template <typename Scalar>
DiscreteMeasure<Scalar> build_measure(const GeneratorMatrix<Scalar>& gen) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto& grid = gen.require_grid();
  const Index m = gen.size();
  const Index n = m - 1;

  if (gen.has_negative_rates())
    throw NegativeRateError(gen.negative_rate_rows.front(),
                            "discrete measure needs positive off-diagonal rates; first offending row " +
                                std::to_string(gen.negative_rate_rows.front()));
  if (gen.stickiness.is_absorbing())
    throw SymmetrizationError("absorbing boundary row (rho = 0) cannot be symmetrized");

  DiscreteMeasure<Scalar> out;
  out.m = Vector::Zero(m);
  out.weights = Vector::Zero(m);
  out.log_weights = Vector::Zero(m);
  out.s_inv = Vector::Zero(m);

  const Scalar d0 = grid.delta_plus(0);
  Scalar log_M0;
  Scalar rho_beta;
  if (gen.stickiness.is_reflecting()) {
    out.alpha = std::numeric_limits<Scalar>::infinity();
    log_M0 = Scalar(0);
    rho_beta = gen.sup[0] * d0;
    out.s_inv[0] = std::numeric_limits<Scalar>::infinity();
  } else {
    const Scalar rho = gen.stickiness.value();
    out.alpha = gen.scheme == Scheme::Scheme1 ? gen.drift[0] : rho;
    log_M0 = out.alpha * d0 / gen.sigma2[0] - std::log(rho);
    rho_beta = rho * gen.beta;
    out.s_inv[0] = std::exp(out.alpha * d0 / gen.sigma2[0]);
  }
  out.M0 = std::exp(log_M0);
  out.weights[0] = out.M0;
  out.log_weights[0] = log_M0;

  auto log_positive = [](Scalar v, Index row) {
    if (!(v > Scalar(0)))
      throw NegativeRateError(row, "nonpositive factor in speed-density product at row " + std::to_string(row));
    return std::log(v);
  };

  Scalar log_m = log_M0 + log_positive(Scalar(2) * rho_beta, 0) -
                 log_positive(-gen.drift[1] * grid.delta_plus(1) + gen.sigma2[1], 1);
  for (Index i = 1; i <= n; ++i) {
    if (i > 1)
      log_m += log_positive(gen.drift[i - 1] * grid.delta_minus(i - 1) + gen.sigma2[i - 1], i - 1) -
               log_positive(-gen.drift[i] * grid.delta_plus(i) + gen.sigma2[i], i);
    out.m[i] = std::exp(log_m);
    out.log_weights[i] = log_m + std::log(grid.delta_avg(i));
    out.weights[i] = std::exp(out.log_weights[i]);
    out.s_inv[i] = out.m[i] * (gen.drift[i] * grid.delta_minus(i) + gen.sigma2[i]) / Scalar(2);
  }
  return out;
}

template <typename Scalar>
DiscreteMeasure<Scalar> build_measure(const DiffusionSpec<Scalar>& spec, const GeneratorMatrix<Scalar>& gen) {
  const auto& grid = gen.require_grid();
  if (grid.left() != spec.left_boundary() || grid.right() != spec.right_boundary())
    throw InvalidArgument("generator grid does not match the diffusion's domain");
  return build_measure(gen);
}

/// max |A - A^T| / max |A| for A = diag(M_n) G_n.
template <typename Scalar>
Scalar symmetry_residual(const DiscreteMeasure<Scalar>& meas, const GeneratorMatrix<Scalar>& gen) {
  if (meas.size() != gen.size()) throw InvalidArgument("measure and generator sizes differ");
  Scalar worst = 0;
  Scalar scale = 0;
  for (Index i = 0; i < gen.size(); ++i) {
    scale = std::max(scale, std::abs(meas.weights[i] * gen.diag[i]));
    if (i + 1 < gen.size()) {
      const Scalar a = meas.weights[i] * gen.sup[i];
      const Scalar b = meas.weights[i + 1] * gen.sub[i + 1];
      scale = std::max({scale, std::abs(a), std::abs(b)});
      worst = std::max(worst, std::abs(a - b));
    }
  }
  return scale > 0 ? worst / scale : worst;
}

/// (f, g)_n = f(x_0) g(x_0) M_n(x_0) + sum_i f(x_i) g(x_i) m_n(x_i) dx_i.
template <typename Scalar, typename DerivedF, typename DerivedG>
Scalar inner_product(const DiscreteMeasure<Scalar>& meas, const Eigen::MatrixBase<DerivedF>& f,
                     const Eigen::MatrixBase<DerivedG>& g) {
  if (f.size() != meas.size() || g.size() != meas.size())
    throw InvalidArgument("inner product: vectors must have length n + 1 = " + std::to_string(meas.size()));
  return (f.array() * g.array() * meas.weights.array()).sum();
}

}  // namespace sticky
