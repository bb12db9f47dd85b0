#pragma once

#include "sticky/errors.hpp"
#include "sticky/expm.hpp"
#include "sticky/generator.hpp"
#include "sticky/measures.hpp"
#include "sticky/numerics.hpp"

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace sticky {

/// Eigenpairs (lambda_k, phi_k) of -G_n, k = 1..n+1, in the probabilistic
/// normalization (phi_j, phi_k)_n = delta_jk. Column k - 1 of
/// `eigenfunctions` is phi_k over x_0..x_n.
template <typename Scalar>
struct SpectralDecomposition {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector eigenvalues;
  Matrix eigenfunctions;

  Index size() const noexcept { return eigenvalues.size(); }
};

/// Eigenvectors of the symmetrized matrix mapped back by D^{-1/2}. Since
/// they have unit Euclidean norm, phi_k = D^{-1/2} v_k has unit discrete
/// norm. Signs are fixed so that phi_k(x_0) > 0 (first nonzero entry
/// positive if phi_k(x_0) = 0).
template <typename Scalar>
SpectralDecomposition<Scalar> decompose(const GeneratorMatrix<Scalar>& gen, const DiscreteMeasure<Scalar>& meas) {
  const auto sys = symmetric_eigensystem(gen, meas);
  SpectralDecomposition<Scalar> dec;
  dec.eigenvalues = sys.lambda;
  dec.eigenfunctions = sys.inv_sqrt_weights.asDiagonal() * sys.basis;
  for (Index k = 0; k < dec.size(); ++k) {
    auto phi = dec.eigenfunctions.col(k);
    for (Index i = 0; i < phi.size(); ++i) {
      if (phi[i] == Scalar(0)) continue;
      if (phi[i] < Scalar(0)) phi = -phi;
      break;
    }
  }
  return dec;
}

/// max_{j,k} |(phi_j, phi_k)_n - delta_jk|.
template <typename Scalar>
Scalar orthonormality_residual(const SpectralDecomposition<Scalar>& dec, const DiscreteMeasure<Scalar>& meas) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (meas.size() != dec.eigenfunctions.rows()) throw InvalidArgument("measure and decomposition sizes differ");
  const Matrix gram = dec.eigenfunctions.transpose() * meas.weights.asDiagonal() * dec.eigenfunctions;
  return (gram - Matrix::Identity(dec.size(), dec.size())).cwiseAbs().maxCoeff();
}

/// True when 0 <= lambda_1 < lambda_2 < ... (within `tol` below zero for the
/// first eigenvalue, which vanishes without killing).
template <typename Scalar>
bool spectrum_is_ordered(const SpectralDecomposition<Scalar>& dec, Scalar tol = Scalar(0)) {
  const auto& ev = dec.eigenvalues;
  if (ev.size() == 0 || ev[0] < -tol) return false;
  for (Index k = 1; k < ev.size(); ++k)
    if (!(ev[k] > ev[k - 1])) return false;
  return true;
}

/// Least-squares slope of log lambda_k against log k over k = k_lo..k_hi
/// (1-based, inclusive).
template <typename Scalar>
double eigenvalue_growth_slope(const SpectralDecomposition<Scalar>& dec, Index k_lo, Index k_hi) {
  if (k_lo < 1 || k_hi <= k_lo || k_hi > dec.size()) throw InvalidArgument("eigenvalue index range out of bounds");
  std::vector<double> ks, ls;
  for (Index k = k_lo; k <= k_hi; ++k) {
    ks.push_back(double(k));
    ls.push_back(double(dec.eigenvalues[k - 1]));
  }
  return fit_loglog(ks, ls).slope;
}

/// P_n(t, x_i, x_j) = M_n(x_j) sum_k exp(-lambda_k t) phi_k(x_i) phi_k(x_j).
template <typename Scalar>
Scalar kernel_via_expansion(const SpectralDecomposition<Scalar>& dec, const DiscreteMeasure<Scalar>& meas, Scalar t,
                            Index i, Index j) {
  if (!(t > Scalar(0))) throw InvalidArgument("expansion kernel needs t > 0");
  const Index m = dec.size();
  if (i < 0 || i >= m || j < 0 || j >= m) throw InvalidArgument("kernel state index out of range");
  const Scalar sum = ((-dec.eigenvalues.array() * t).exp() * dec.eigenfunctions.row(i).transpose().array() *
                      dec.eigenfunctions.row(j).transpose().array())
                         .sum();
  return meas.weights[j] * sum;
}

/// p_n(t, x_i, x_j) = P_n(t, x_i, x_j) / dx_j for interior j.
template <typename Scalar>
Scalar density_via_expansion(const SpectralDecomposition<Scalar>& dec, const DiscreteMeasure<Scalar>& meas, Scalar t,
                             Index i, Index j, const Grid<Scalar>& grid) {
  if (j < 1 || j > grid.interior_count()) throw InvalidArgument("density needs an interior target state");
  return kernel_via_expansion(dec, meas, t, i, j) / grid.delta_avg(j);
}

/// The whole kernel Phi exp(-Lambda t) Phi^T diag(M_n).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> expansion_kernel(const SpectralDecomposition<Scalar>& dec,
                                                                       const DiscreteMeasure<Scalar>& meas, Scalar t) {
  if (!(t > Scalar(0))) throw InvalidArgument("expansion kernel needs t > 0");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> decay = (-dec.eigenvalues.array() * t).exp();
  return dec.eigenfunctions * decay.asDiagonal() * dec.eigenfunctions.transpose() * meas.weights.asDiagonal();
}

}  // namespace sticky
