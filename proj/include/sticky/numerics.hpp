#pragma once

#include "sticky/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace sticky {

/// LU factorization of a tridiagonal matrix without pivoting (Thomas
/// algorithm). Row i is lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1].
/// Every system this library factors is diagonally dominant; a vanishing
/// pivot is still reported.
template <typename Scalar>
class TridiagonalLU {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TridiagonalLU() = default;

  TridiagonalLU(const Vector& lower, const Vector& diag, const Vector& upper) { factor(lower, diag, upper); }

  void factor(const Vector& lower, const Vector& diag, const Vector& upper) {
    const Index m = diag.size();
    lower_ = lower;
    upper_ = upper;
    pivot_.resize(m);
    const Scalar scale = diag.cwiseAbs().maxCoeff();
    const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * (scale > 0 ? scale : Scalar(1));
    pivot_[0] = diag[0];
    check_pivot(0, tiny);
    for (Index i = 1; i < m; ++i) {
      pivot_[i] = diag[i] - lower_[i] * upper_[i - 1] / pivot_[i - 1];
      check_pivot(i, tiny);
    }
  }

  Index size() const noexcept { return pivot_.size(); }

  /// Overwrites the right-hand side(s) with the solution. Works column-wise
  /// on a vector or a matrix.
  template <typename Derived>
  void solve_in_place(Eigen::MatrixBase<Derived>& rhs) const {
    const Index m = size();
    if (rhs.rows() != m) throw InvalidArgument("tridiagonal solve: right-hand side has wrong length");
    if constexpr (Derived::ColsAtCompileTime == 1) {
      for (Index i = 1; i < m; ++i) rhs.coeffRef(i) -= (lower_[i] / pivot_[i - 1]) * rhs.coeff(i - 1);
      rhs.coeffRef(m - 1) /= pivot_[m - 1];
      for (Index i = m - 2; i >= 0; --i) rhs.coeffRef(i) = (rhs.coeff(i) - upper_[i] * rhs.coeff(i + 1)) / pivot_[i];
      return;
    }
    for (Index i = 1; i < m; ++i) rhs.row(i) -= (lower_[i] / pivot_[i - 1]) * rhs.row(i - 1);
    rhs.row(m - 1) /= pivot_[m - 1];
    for (Index i = m - 2; i >= 0; --i) {
      rhs.row(i) -= upper_[i] * rhs.row(i + 1);
      rhs.row(i) /= pivot_[i];
    }
  }

 private:
  void check_pivot(Index i, Scalar tiny) const {
    if (!(std::abs(pivot_[i]) > tiny) || !std::isfinite(pivot_[i]))
      throw SingularSystemError(i, "singular tridiagonal system: pivot " + std::to_string(double(pivot_[i])) +
                                       " at row " + std::to_string(i));
  }

  Vector lower_;
  Vector upper_;
  Vector pivot_;
};

/// Neumaier compensated summation.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar v) {
    const Scalar t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

struct LineFit {
  double slope;
  double intercept;
};

/// Least-squares line through (log x, log y). Needs two distinct abscissae
/// with positive ordinates.
inline LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("log-log fit needs at least two points");
  double sx = 0, sy = 0;
  const double count = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw InvalidArgument("log-log fit needs positive data");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0)) throw InvalidArgument("log-log fit needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

/// Inverse of the standard normal CDF. Rational initial guess (Acklam)
/// refined by one Halley step against std::erfc; accurate to ~1e-15.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal quantile needs 0 < p < 1");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

}  // namespace sticky
