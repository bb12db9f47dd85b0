#pragma once

#include "sticky/errors.hpp"
#include "sticky/generator.hpp"
#include "sticky/measures.hpp"
#include "sticky/numerics.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace sticky {

/// How exp(G t) is evaluated.
///   Dense        Pade scaling and squaring on the full matrix, O(n^3).
///   Spectral     eigendecomposition of the symmetrized tridiagonal, O(n^2)
///                per action once decomposed.
///   Extrapolated implicit steps on dM = G M dt with an extrapolation
///                tableau per basic interval, O(n) per step.
enum class Engine { Dense, Spectral, Extrapolated };

inline std::string to_string(Engine e) {
  switch (e) {
    case Engine::Dense: return "dense";
    case Engine::Spectral: return "spectral";
    case Engine::Extrapolated: return "extrap";
  }
  return "?";
}

inline Engine engine_from_string(const std::string& s) {
  if (s == "dense") return Engine::Dense;
  if (s == "spectral") return Engine::Spectral;
  if (s == "extrap") return Engine::Extrapolated;
  throw InvalidArgument("unknown engine '" + s + "' (expected dense, spectral or extrap)");
}

struct ExtrapolationConfig {
  /// Extrapolation stages s; stage i takes M_i = i implicit steps.
  int stages = 2;
  /// Basic step H is min(T, max_basic_step), shrunk so that T is a whole
  /// number of basic steps.
  double max_basic_step = 0.5;

  void validate() const {
    if (stages < 1) throw InvalidArgument("extrapolation needs at least one stage");
    if (!(max_basic_step > 0) || !std::isfinite(max_basic_step))
      throw InvalidArgument("basic step must be positive and finite");
  }

  static int step_count(int stage) { return stage; }

  /// (H, number of basic intervals) for horizon t > 0.
  std::pair<double, Index> basic_steps(double t) const {
    validate();
    if (!(t > 0)) throw InvalidArgument("extrapolation horizon must be positive");
    const double h = std::min(t, max_basic_step);
    const auto count = static_cast<Index>(std::ceil(t / h * (1.0 - 1e-12)));
    return {t / double(count), count};
  }
};

struct EngineOptions {
  Engine engine = Engine::Extrapolated;
  ExtrapolationConfig extrapolation{};
};

namespace detail {

template <typename Scalar>
void check_time(Scalar t) {
  if (!(t >= Scalar(0)) || !std::isfinite(t)) throw InvalidArgument("time must be finite and nonnegative");
}

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& m, const char* engine) {
  if (!m.allFinite()) throw NumericalError(std::string(engine) + " engine produced non-finite values");
}

}  // namespace detail

/// Full exp(G t) by Pade scaling and squaring.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> expm_dense(const GeneratorMatrix<Scalar>& gen, Scalar t) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::check_time(t);
  if (t == Scalar(0)) return Matrix::Identity(gen.size(), gen.size());
  Matrix a = gen.dense() * t;
  Matrix e = a.exp();
  detail::check_finite(e, "dense");
  return e;
}

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expm_action_dense(const GeneratorMatrix<Scalar>& gen,
                                                           const Eigen::MatrixBase<Derived>& f, Scalar t) {
  if (f.size() != gen.size()) throw InvalidArgument("payoff length does not match generator");
  detail::check_time(t);
  if (t == Scalar(0)) return f;
  return expm_dense(gen, t) * f;
}

/// Eigenpairs of S = D^{1/2} G D^{-1/2}, D = diag(M_n). `lambda` are the
/// eigenvalues of -G in ascending order; `basis` holds the matching
/// orthonormal eigenvectors of S (unit Euclidean norm) as columns.
template <typename Scalar>
struct SymmetricEigensystem {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector lambda;
  Matrix basis;
  Vector sqrt_weights;
  Vector inv_sqrt_weights;
};

inline constexpr double kSymmetrizationTolerance = 1e-12;

template <typename Scalar>
SymmetricEigensystem<Scalar> symmetric_eigensystem(const GeneratorMatrix<Scalar>& gen,
                                                   const DiscreteMeasure<Scalar>& meas) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Scalar residual = symmetry_residual(meas, gen);
  if (!(residual <= Scalar(kSymmetrizationTolerance)))
    throw SymmetrizationError("diag(M) G is not symmetric: relative residual " + std::to_string(double(residual)));

  const Index m = gen.size();
  Vector off(std::max<Index>(m - 1, 0));
  for (Index i = 0; i + 1 < m; ++i) off[i] = std::sqrt(gen.sup[i] * gen.sub[i + 1]);

  Eigen::SelfAdjointEigenSolver<Matrix> solver;
  solver.computeFromTridiagonal(gen.diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw EigenSolverError(-1, "tridiagonal eigensolver did not converge");

  SymmetricEigensystem<Scalar> sys;
  const auto& ev = solver.eigenvalues();
  for (Index k = 0; k < m; ++k)
    if (!std::isfinite(ev[k])) throw EigenSolverError(k, "eigensolver returned a non-finite eigenvalue at index " + std::to_string(k));
  // S has eigenvalues -lambda; ascending lambda is descending eig(S).
  sys.lambda = -ev.reverse();
  sys.basis = solver.eigenvectors().rowwise().reverse();
  sys.sqrt_weights = (meas.log_weights / Scalar(2)).array().exp();
  sys.inv_sqrt_weights = (-meas.log_weights / Scalar(2)).array().exp();
  return sys;
}

/// exp(G t) through the spectral decomposition. The decomposition is done
/// once; apply() and kernel() can then be called for any number of times.
template <typename Scalar>
class SpectralPropagator {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  SpectralPropagator(const GeneratorMatrix<Scalar>& gen, const DiscreteMeasure<Scalar>& meas)
      : sys_(symmetric_eigensystem(gen, meas)) {}

  template <typename Derived>
  Vector apply(const Eigen::MatrixBase<Derived>& f, Scalar t) const {
    if (f.size() != sys_.lambda.size()) throw InvalidArgument("payoff length does not match generator");
    detail::check_time(t);
    Vector coeff = sys_.basis.transpose() * sys_.sqrt_weights.cwiseProduct(f);
    coeff.array() *= (-sys_.lambda.array() * t).exp();
    Vector u = sys_.inv_sqrt_weights.cwiseProduct(sys_.basis * coeff);
    detail::check_finite(u, "spectral");
    return u;
  }

  Matrix kernel(Scalar t) const {
    detail::check_time(t);
    const Vector decay = (-sys_.lambda.array() * t).exp();
    Matrix p = sys_.inv_sqrt_weights.asDiagonal() * (sys_.basis * decay.asDiagonal() * sys_.basis.transpose()) *
               sys_.sqrt_weights.asDiagonal();
    detail::check_finite(p, "spectral");
    return p;
  }

  const SymmetricEigensystem<Scalar>& eigensystem() const noexcept { return sys_; }

 private:
  SymmetricEigensystem<Scalar> sys_;
};

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expm_action_spectral(const GeneratorMatrix<Scalar>& gen,
                                                              const DiscreteMeasure<Scalar>& meas,
                                                              const Eigen::MatrixBase<Derived>& f, Scalar t) {
  return SpectralPropagator<Scalar>(gen, meas).apply(f, t);
}

/// exp(G t) f by extrapolated backward stepping. Per basic interval H,
/// A_{i,1} takes M_i = i steps (I - (H/M_i) G) v' = v, and
///
///   A_{i,j} = A_{i,j-1} + (A_{i,j-1} - A_{i-1,j-1}) / (M_i / M_{i-j+1} - 1);
///
/// A_{s,s} seeds the next interval. `f` may be a vector or a matrix whose
/// columns are propagated together.
template <typename Scalar, typename Derived>
typename Derived::PlainObject expm_action_extrapolated(const GeneratorMatrix<Scalar>& gen,
                                                       const Eigen::MatrixBase<Derived>& f, Scalar t,
                                                       const ExtrapolationConfig& cfg) {
  using Plain = typename Derived::PlainObject;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (f.rows() != gen.size()) throw InvalidArgument("payoff length does not match generator");
  detail::check_time(t);
  cfg.validate();
  if (t == Scalar(0)) return f;

  const auto [h, intervals] = cfg.basic_steps(double(t));
  const int s = cfg.stages;
  const Index m = gen.size();

  std::vector<TridiagonalLU<Scalar>> lu;
  lu.reserve(s);
  for (int i = 1; i <= s; ++i) {
    const Scalar dt = Scalar(h) / Scalar(ExtrapolationConfig::step_count(i));
    Vector lower = -dt * gen.sub;
    Vector upper = -dt * gen.sup;
    Vector diag = Vector::Ones(m) - dt * gen.diag;
    lu.emplace_back(lower, diag, upper);
  }

  Plain state = f;
  std::vector<Plain> prev(s), cur(s);
  for (Index interval = 0; interval < intervals; ++interval) {
    for (int i = 1; i <= s; ++i) {
      cur[0] = state;
      for (int step = 0; step < ExtrapolationConfig::step_count(i); ++step) lu[i - 1].solve_in_place(cur[0]);
      for (int j = 2; j <= i; ++j) {
        const Scalar ratio = Scalar(ExtrapolationConfig::step_count(i)) /
                             Scalar(ExtrapolationConfig::step_count(i - j + 1));
        cur[j - 1] = cur[j - 2] + (cur[j - 2] - prev[j - 2]) / (ratio - Scalar(1));
      }
      std::swap(prev, cur);
    }
    state = prev[s - 1];
  }
  detail::check_finite(state, "extrapolation");
  return state;
}

/// exp(G t) f with the engine chosen in `opts`. The spectral engine builds
/// the discrete measure on the fly.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expm_action(const GeneratorMatrix<Scalar>& gen,
                                                     const Eigen::MatrixBase<Derived>& f, Scalar t,
                                                     const EngineOptions& opts) {
  switch (opts.engine) {
    case Engine::Dense: return expm_action_dense(gen, f, t);
    case Engine::Spectral: return expm_action_spectral(gen, build_measure(gen), f, t);
    case Engine::Extrapolated: {
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = f;
      return expm_action_extrapolated(gen, v, t, opts.extrapolation);
    }
  }
  throw InvalidArgument("unknown engine");
}

inline constexpr double kKernelTolerance = 1e-12;

/// Throws unless every entry is >= -tol and every row sums to <= 1 + tol.
template <typename Derived>
void audit_substochastic(const Eigen::MatrixBase<Derived>& p, double tol = kKernelTolerance) {
  const double lowest = double(p.minCoeff());
  if (lowest < -tol)
    throw NumericalError("transition kernel has a negative entry " + std::to_string(lowest) +
                         " (grid too coarse or engine failure)");
  const double top = double(p.rowwise().sum().maxCoeff());
  if (top > 1.0 + tol)
    throw NumericalError("transition kernel has a row sum " + std::to_string(top) + " above one");
}

/// P_n(t) = exp(G t), the (n+1) x (n+1) sub-probability kernel, audited for
/// sub-stochasticity.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> transition_matrix(const GeneratorMatrix<Scalar>& gen, Scalar t,
                                                                        const EngineOptions& opts = {Engine::Dense, {}}) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::check_time(t);
  Matrix p;
  switch (opts.engine) {
    case Engine::Dense: p = expm_dense(gen, t); break;
    case Engine::Spectral: p = SpectralPropagator<Scalar>(gen, build_measure(gen)).kernel(t); break;
    case Engine::Extrapolated: {
      const Matrix identity = Matrix::Identity(gen.size(), gen.size());
      p = expm_action_extrapolated(gen, identity, t, opts.extrapolation);
      break;
    }
  }
  audit_substochastic(p);
  return p;
}

}  // namespace sticky
