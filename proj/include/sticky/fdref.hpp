#pragma once

#include "sticky/errors.hpp"
#include "sticky/generator.hpp"
#include "sticky/numerics.hpp"
#include "sticky/solve.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace sticky {

/// Crank-Nicolson on the same spatial operator G_n as the chain, so the
/// sticky boundary condition is whatever row 0 of G_n encodes.
struct CNConfig {
  int steps_per_month = 5;

  void validate() const {
    if (steps_per_month < 1) throw InvalidArgument("steps per month must be at least 1");
  }

  /// N = ceil(12 T steps_per_month).
  long long step_count(double maturity) const {
    validate();
    return std::max(1LL, static_cast<long long>(std::ceil(12.0 * maturity * steps_per_month - 1e-9)));
  }
};

/// (I - dt/2 G) v_{m+1} = (I + dt/2 G) v_m from v_0 = payoff, N steps.
template <typename Scalar, typename Derived>
ValueVector<Scalar> crank_nicolson_solve(const GeneratorMatrix<Scalar>& gen, const Eigen::MatrixBase<Derived>& payoff,
                                         Scalar maturity, const CNConfig& cfg = {}) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (!(maturity > Scalar(0)) || !std::isfinite(maturity)) throw InvalidArgument("maturity must be positive");
  if (payoff.size() != gen.size()) throw InvalidArgument("payoff must have one value per state x_0..x_n");
  const long long steps = cfg.step_count(double(maturity));
  const Scalar half = maturity / Scalar(steps) / Scalar(2);

  const Index m = gen.size();
  const Vector lower = -half * gen.sub;
  const Vector upper = -half * gen.sup;
  const Vector diag = Vector::Ones(m) - half * gen.diag;
  const TridiagonalLU<Scalar> lu(lower, diag, upper);

  Vector v = payoff;
  for (long long s = 0; s < steps; ++s) {
    Vector rhs = v + half * gen.apply(v);
    lu.solve_in_place(rhs);
    v = std::move(rhs);
  }
  if (!v.allFinite()) throw NumericalError("Crank-Nicolson produced non-finite values");

  ValueVector<Scalar> out;
  out.values = std::move(v);
  out.maturity = maturity;
  out.payoff = "custom";
  out.method = "cn";
  out.scheme = gen.scheme;
  return out;
}

}  // namespace sticky
