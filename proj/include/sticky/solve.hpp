#pragma once

#include "sticky/errors.hpp"
#include "sticky/expm.hpp"
#include "sticky/generator.hpp"
#include "sticky/grid.hpp"
#include "sticky/model.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>

namespace sticky {

/// u_n(t, x_i) = exp(G_n t) f_n (x_i) for i = 0..n, with the metadata needed
/// to attribute it.
template <typename Scalar>
struct ValueVector {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
  Scalar maturity{};
  std::string payoff;
  std::string method;
  Scheme scheme{Scheme::Scheme2};

  Scalar operator[](Index i) const { return values[i]; }
};

/// Index of x on `grid`, or OffGridError.
template <typename Scalar>
Index node_index(const Grid<Scalar>& grid, Scalar x) {
  const auto i = grid.index_of(x);
  if (!i)
    throw OffGridError("state " + std::to_string(double(x)) +
                       " is not a grid node; build the grid with build_with_node to place it exactly");
  return *i;
}

template <typename Scalar, typename Derived>
ValueVector<Scalar> feynman_kac(const GeneratorMatrix<Scalar>& gen, const Eigen::MatrixBase<Derived>& payoff, Scalar t,
                                const EngineOptions& opts = {}, std::string payoff_name = "custom") {
  if (payoff.size() != gen.size()) throw InvalidArgument("payoff must have one value per state x_0..x_n");
  if (!payoff.allFinite()) throw InvalidArgument("payoff must be finite on the grid");
  ValueVector<Scalar> out;
  out.values = expm_action(gen, payoff, t, opts);
  out.maturity = t;
  out.payoff = std::move(payoff_name);
  out.method = to_string(opts.engine);
  out.scheme = gen.scheme;
  return out;
}

/// Payoff given as a function of the state, sampled at x_0..x_n.
template <typename Scalar>
ValueVector<Scalar> feynman_kac(const GeneratorMatrix<Scalar>& gen, const std::function<Scalar(Scalar)>& payoff,
                                Scalar t, const EngineOptions& opts = {}, std::string payoff_name = "custom") {
  const auto& grid = gen.require_grid();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> f(gen.size());
  for (Index i = 0; i < gen.size(); ++i) f[i] = payoff(grid.point(i));
  return feynman_kac(gen, f, t, opts, std::move(payoff_name));
}

/// Zero-coupon bond, f == 1; the discounting comes from k in the generator.
template <typename Scalar>
ValueVector<Scalar> bond_prices(const GeneratorMatrix<Scalar>& gen, Scalar t, const EngineOptions& opts = {}) {
  return feynman_kac(gen, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(gen.size()), t, opts, "unit");
}

/// P_n(t, x_i, x_j) for all i, as the action of exp(G_n t) on e_j.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> transition_column(const GeneratorMatrix<Scalar>& gen, Scalar t, Index j,
                                                           const EngineOptions& opts = {}) {
  if (!(t > Scalar(0))) throw InvalidArgument("transition mass needs t > 0");
  if (j < 0 || j >= gen.size()) throw InvalidArgument("target state index out of range");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(gen.size());
  e[j] = Scalar(1);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col = expm_action(gen, e, t, opts);
  if (col.minCoeff() < Scalar(-kKernelTolerance)) throw NumericalError("transition mass below -1e-12");
  return col;
}

/// P_n(t, x_i, x_0): the chain's approximation of the sticky point mass at l.
template <typename Scalar>
Scalar transition_mass_at_boundary(const GeneratorMatrix<Scalar>& gen, Scalar t, Index i,
                                   const EngineOptions& opts = {}) {
  if (i < 0 || i >= gen.size()) throw InvalidArgument("initial state index out of range");
  return transition_column(gen, t, Index(0), opts)[i];
}

/// p_n(t, x_i, x_j) = P_n(t, x_i, x_j) / dx_j for interior x_j.
template <typename Scalar>
Scalar density(const GeneratorMatrix<Scalar>& gen, Scalar t, Index i, Index j, const EngineOptions& opts = {}) {
  const auto& grid = gen.require_grid();
  if (j < 1 || j > grid.interior_count())
    throw InvalidArgument("density is defined only at interior states x_1..x_n");
  if (i < 0 || i >= gen.size()) throw InvalidArgument("initial state index out of range");
  return transition_column(gen, t, j, opts)[i] / grid.delta_avg(j);
}

/// P(tau_z > t | X_0 = x) = exp(H_n t) 1 at x, where H_n is G_n (with k = 0)
/// restricted to the states below z. Both x and z must be nodes of `grid`.
template <typename Scalar>
Scalar first_passage_survival(const DiffusionSpec<Scalar>& spec, const Grid<Scalar>& grid, Scalar z, Scalar t,
                              Scalar x, Scheme scheme, const EngineOptions& opts = {},
                              const GeneratorOptions& gen_opts = {}) {
  if (!(t >= Scalar(0))) throw InvalidArgument("time must be nonnegative");
  const Index iz = node_index(grid, z);
  const Index ix = node_index(grid, x);
  if (ix >= iz) throw InvalidArgument("initial state must lie strictly below the passage level");
  if (iz < 2) throw InvalidArgument("passage level must leave at least two states below it");
  if (t == Scalar(0)) return Scalar(1);
  const auto gen = build_generator(spec.without_killing(), grid, scheme, gen_opts);
  const auto h = restrict_below(gen, iz);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ones = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(h.size());
  return expm_action(h, ones, t, opts)[ix];
}

}  // namespace sticky
