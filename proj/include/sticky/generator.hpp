#pragma once

#include "sticky/errors.hpp"
#include "sticky/grid.hpp"
#include "sticky/model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace sticky {

/// Boundary-row construction. Scheme1 discretizes rho g'(l) directly;
/// Scheme2 matches the first two local moments at l through the factor beta.
enum class Scheme { Scheme1 = 1, Scheme2 = 2 };

inline std::string to_string(Scheme s) { return s == Scheme::Scheme1 ? "1" : "2"; }

inline Scheme scheme_from_int(int s) {
  if (s == 1) return Scheme::Scheme1;
  if (s == 2) return Scheme::Scheme2;
  throw InvalidArgument("scheme must be 1 or 2");
}

struct GeneratorOptions {
  /// Keep going when central differencing produces a negative off-diagonal
  /// rate (coarse grid, strong drift). The result is then not a CTMC
  /// generator: exp(G t) is still defined, but the measure, spectral route
  /// and path sampler refuse it. The offending rows are recorded.
  bool allow_negative_rates = false;
};

/// Tridiagonal rate matrix on the states x_0..x_n. The killed right boundary
/// x_{n+1} has no row; the rate into it is `upper_leak`.
///
/// Storage is by row: `sub[i]` = G[i, i-1] (sub[0] unused, zero),
/// `sup[i]` = G[i, i+1] (sup[n] unused, zero), `diag[i]` = G[i, i].
template <typename Scalar>
struct GeneratorMatrix {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector sub;
  Vector diag;
  Vector sup;
  Scalar upper_leak{0};
  Vector kill;
  /// mu(x_i) and sigma^2(x_i) at the nodes 0..n, kept for the discrete measure.
  Vector drift;
  Vector sigma2;
  Scalar beta{1};
  Scheme scheme{Scheme::Scheme2};
  Stickiness<Scalar> stickiness = Stickiness<Scalar>::absorbing();
  /// Empty for matrices assembled directly from raw rates.
  std::optional<Grid<Scalar>> grid;
  std::vector<Index> negative_rate_rows;

  Index size() const noexcept { return diag.size(); }
  bool has_negative_rates() const noexcept { return !negative_rate_rows.empty(); }

  Scalar operator()(Index i, Index j) const {
    if (i == j) return diag[i];
    if (j == i - 1) return sub[i];
    if (j == i + 1) return sup[i];
    return Scalar(0);
  }

  Matrix dense() const {
    const Index m = size();
    Matrix g = Matrix::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
      g(i, i) = diag[i];
      if (i > 0) g(i, i - 1) = sub[i];
      if (i + 1 < m) g(i, i + 1) = sup[i];
    }
    return g;
  }

  /// G v without forming the matrix.
  template <typename Derived>
  Vector apply(const Eigen::MatrixBase<Derived>& v) const {
    const Index m = size();
    Vector out(m);
    for (Index i = 0; i < m; ++i) {
      Scalar acc = diag[i] * v[i];
      if (i > 0) acc += sub[i] * v[i - 1];
      if (i + 1 < m) acc += sup[i] * v[i + 1];
      out[i] = acc;
    }
    return out;
  }

  const Grid<Scalar>& require_grid() const {
    if (!grid) throw InvalidArgument("generator has no grid attached");
    return *grid;
  }
};

/// Generator from raw tridiagonal rates; row sums close to -kill. Used for
/// small hand-built chains. `sub[0]` and `sup[m-1]` are ignored.
template <typename Scalar>
GeneratorMatrix<Scalar> make_tridiagonal_generator(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& sub,
                                                   const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                                                   const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& sup) {
  const Index m = diag.size();
  if (m < 1 || sub.size() != m || sup.size() != m)
    throw InvalidArgument("tridiagonal bands must all have the same positive length");
  GeneratorMatrix<Scalar> g;
  g.sub = sub;
  g.sup = sup;
  g.sub[0] = Scalar(0);
  g.sup[m - 1] = Scalar(0);
  g.diag = diag;
  g.kill = -(g.sub + g.diag + g.sup);
  g.upper_leak = Scalar(0);
  g.drift = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(m);
  g.sigma2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(m);
  for (Index i = 0; i < m; ++i)
    if ((i > 0 && g.sub[i] < 0) || (i + 1 < m && g.sup[i] < 0)) g.negative_rate_rows.push_back(i);
  return g;
}

namespace detail {

template <typename Scalar>
Scalar scheme2_denominator(Scalar rho, Scalar mu0, Scalar sigma2_0, Scalar delta0) {
  return Scalar(1) + (rho - mu0) / sigma2_0 * delta0;
}

}  // namespace detail

/// Assemble G_n on `grid`. Interior rows use central differences for mu g'
/// and the standard three-point stencil for sigma^2 g'' / 2; row 0 is
/// rho beta (g(x_1) - g(x_0)) / d+x_0 - k(x_0) g(x_0).
template <typename Scalar>
GeneratorMatrix<Scalar> build_generator(const DiffusionSpec<Scalar>& spec, const Grid<Scalar>& grid,
                                        Scheme scheme, const GeneratorOptions& options = {}) {
  if (grid.left() != spec.left_boundary() || grid.right() != spec.right_boundary())
    throw InvalidArgument("grid does not span the diffusion's [l, r]");

  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index n = grid.interior_count();
  const Index m = n + 1;

  GeneratorMatrix<Scalar> g;
  g.scheme = scheme;
  g.stickiness = spec.stickiness();
  g.grid = grid;
  g.sub = Vector::Zero(m);
  g.sup = Vector::Zero(m);
  g.diag = Vector::Zero(m);
  g.kill = Vector::Zero(m);
  g.drift = Vector::Zero(m);
  g.sigma2 = Vector::Zero(m);

  for (Index i = 0; i < m; ++i) {
    const auto c = evaluate_coefficients(spec, grid.point(i));
    g.drift[i] = c.mu;
    g.sigma2[i] = c.sigma2;
    g.kill[i] = c.k;
  }

  auto report_negative = [&](Index row, Scalar rate, const char* side) {
    if (rate > Scalar(0)) return;
    if (!options.allow_negative_rates)
      throw NegativeRateError(row, std::string("nonpositive ") + side + " rate " +
                                       std::to_string(double(rate)) + " at grid index " +
                                       std::to_string(row) + " (x = " +
                                       std::to_string(double(grid.point(row))) +
                                       "); refine the grid or shrink the domain");
    if (g.negative_rate_rows.empty() || g.negative_rate_rows.back() != row)
      g.negative_rate_rows.push_back(row);
  };

  for (Index i = 1; i <= n; ++i) {
    const Scalar dp = grid.delta_plus(i);
    const Scalar dm = grid.delta_minus(i);
    const Scalar da = grid.delta_avg(i);
    const Scalar mu = g.drift[i];
    const Scalar s2 = g.sigma2[i];
    const Scalar down = (-mu * dp + s2) / (Scalar(2) * dm * da);
    const Scalar up = (mu * dm + s2) / (Scalar(2) * dp * da);
    report_negative(i, down, "downward");
    report_negative(i, up, "upward");
    g.sub[i] = down;
    if (i < n)
      g.sup[i] = up;
    else
      g.upper_leak = up;
  }

  const Scalar d0 = grid.delta_plus(0);
  const Scalar mu0 = g.drift[0];
  const Scalar s20 = g.sigma2[0];
  const auto& st = spec.stickiness();
  Scalar rate0 = Scalar(0);
  switch (st.kind()) {
    case Stickiness<Scalar>::Kind::Absorbing: {
      g.beta = scheme == Scheme::Scheme1 ? Scalar(1)
                                         : Scalar(1) / detail::scheme2_denominator(Scalar(0), mu0, s20, d0);
      rate0 = Scalar(0);
      break;
    }
    case Stickiness<Scalar>::Kind::Reflecting: {
      if (scheme != Scheme::Scheme2)
        throw InvalidArgument("the reflecting limit (rho = inf) is only defined for Scheme 2");
      g.beta = Scalar(0);
      rate0 = s20 / (d0 * d0);
      break;
    }
    case Stickiness<Scalar>::Kind::Finite: {
      const Scalar rho = st.value();
      if (scheme == Scheme::Scheme1) {
        g.beta = Scalar(1);
      } else {
        const Scalar denom = detail::scheme2_denominator(rho, mu0, s20, d0);
        if (!(denom > Scalar(0)))
          throw StickinessTooLargeError("stickiness too large for grid: Scheme 2 denominator " +
                                        std::to_string(double(denom)) + " <= 0 at d+x_0 = " +
                                        std::to_string(double(d0)));
        g.beta = Scalar(1) / denom;
      }
      rate0 = rho * g.beta / d0;
      break;
    }
  }
  g.sup[0] = rate0;

  for (Index i = 0; i < m; ++i) {
    Scalar out = g.sub[i] + g.sup[i] + g.kill[i];
    if (i == n) out += g.upper_leak;
    g.diag[i] = -out;
  }
  return g;
}

/// Fraction of a short time interval that the Scheme 2 chain started at l
/// spends at l: (sigma^2 - mu d) / (sigma^2 + (rho - mu) d).
template <typename Scalar>
Scalar boundary_occupation_fraction(const DiffusionSpec<Scalar>& spec, Scalar delta0) {
  if (!(delta0 > Scalar(0))) throw InvalidArgument("boundary spacing must be positive");
  const auto c = evaluate_coefficients(spec, spec.left_boundary());
  const auto& st = spec.stickiness();
  if (st.is_reflecting()) return Scalar(0);
  const Scalar rho = st.value();
  const Scalar denom = c.sigma2 + (rho - c.mu) * delta0;
  if (!(denom > Scalar(0)))
    throw StickinessTooLargeError("occupation fraction denominator is nonpositive");
  return (c.sigma2 - c.mu * delta0) / denom;
}

/// Sub-generator on the states strictly below x_{index}; x_{index} becomes a
/// killing boundary. This is the matrix H_n used for first-passage
/// probabilities, returned as a generator on [l, x_{index}].
template <typename Scalar>
GeneratorMatrix<Scalar> restrict_below(const GeneratorMatrix<Scalar>& g, Index index) {
  if (index < 2 || index > g.size())
    throw InvalidArgument("restriction index must leave at least two states");
  GeneratorMatrix<Scalar> h = g;
  const Index m = index;
  h.sub = g.sub.head(m);
  h.diag = g.diag.head(m);
  h.sup = g.sup.head(m);
  h.kill = g.kill.head(m);
  h.drift = g.drift.head(m);
  h.sigma2 = g.sigma2.head(m);
  h.upper_leak = index < g.size() ? g.sup[m - 1] : g.upper_leak;
  h.sup[m - 1] = Scalar(0);
  if (g.grid) h.grid = Grid<Scalar>(g.grid->points().head(m + 1), g.grid->ratio_bound());
  h.negative_rate_rows.clear();
  for (Index r : g.negative_rate_rows)
    if (r < m) h.negative_rate_rows.push_back(r);
  return h;
}

}  // namespace sticky
