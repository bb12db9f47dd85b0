#pragma once

#include "sticky/errors.hpp"
#include "sticky/expm.hpp"
#include "sticky/generator.hpp"
#include "sticky/solve.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace sticky {

struct CurvePoint {
  double maturity;
  double price;
  double yield;
};

/// Zero-coupon prices P(T) = u_n(T, x_i) with f == 1 and yields
/// y(T) = -log P(T) / T.
template <typename Scalar>
std::vector<CurvePoint> yield_curve(const GeneratorMatrix<Scalar>& gen, Index i, const std::vector<double>& maturities,
                                    const EngineOptions& opts = {}) {
  if (i < 0 || i >= gen.size()) throw InvalidArgument("initial state index out of range");
  std::vector<CurvePoint> out;
  out.reserve(maturities.size());
  for (double t : maturities) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("maturities must be positive");
    const double price = double(bond_prices(gen, Scalar(t), opts).values[i]);
    if (!(price > 0.0)) throw NumericalError("nonpositive bond price at T = " + std::to_string(t));
    out.push_back({t, price, -std::log(price) / t});
  }
  return out;
}

enum class CurveShape { Upward, Inverted, SShaped, Other };

inline std::string to_string(CurveShape s) {
  switch (s) {
    case CurveShape::Upward: return "upward";
    case CurveShape::Inverted: return "inverted";
    case CurveShape::SShaped: return "s-shaped";
    case CurveShape::Other: return "other";
  }
  return "?";
}

inline constexpr double kFlatYieldTolerance = 1e-8;

/// Shape from the signs of successive yield differences; differences below
/// `flat` in magnitude are ignored. All rising is upward, all falling is
/// inverted, two or more sign changes is s-shaped, anything else is other.
inline CurveShape classify_shape(const std::vector<double>& yields, double flat = kFlatYieldTolerance) {
  std::vector<int> signs;
  for (std::size_t k = 1; k < yields.size(); ++k) {
    const double d = yields[k] - yields[k - 1];
    if (std::abs(d) < flat) continue;
    signs.push_back(d > 0 ? 1 : -1);
  }
  if (signs.empty()) return CurveShape::Other;
  int changes = 0;
  for (std::size_t k = 1; k < signs.size(); ++k)
    if (signs[k] != signs[k - 1]) ++changes;
  if (changes == 0) return signs.front() > 0 ? CurveShape::Upward : CurveShape::Inverted;
  if (changes >= 2) return CurveShape::SShaped;
  return CurveShape::Other;
}

inline CurveShape classify_shape(const std::vector<CurvePoint>& curve, double flat = kFlatYieldTolerance) {
  std::vector<double> y;
  y.reserve(curve.size());
  for (const auto& p : curve) y.push_back(p.yield);
  return classify_shape(y, flat);
}

/// 0.25, 0.5, ..., `last` in steps of `step`.
inline std::vector<double> maturity_ladder(double step = 0.25, double last = 30.0) {
  if (!(step > 0.0) || !(last >= step)) throw InvalidArgument("bad maturity ladder");
  std::vector<double> out;
  const auto count = static_cast<long long>(std::llround(last / step));
  for (long long k = 1; k <= count; ++k) out.push_back(double(k) * step);
  return out;
}

}  // namespace sticky
