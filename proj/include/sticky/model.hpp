#pragma once

#include "sticky/errors.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace sticky {

/// Stickiness of the left boundary. The two limits are explicit tags:
/// rho = 0 is absorbing, rho = +inf is instantaneously reflecting.
template <typename Scalar>
class Stickiness {
 public:
  enum class Kind { Finite, Absorbing, Reflecting };

  /// rho = 0 and rho = +inf are mapped to their limit tags.
  static Stickiness finite(Scalar rho) {
    if (std::isnan(rho) || rho < Scalar(0))
      throw InvalidArgument("stickiness must be nonnegative, got " + std::to_string(double(rho)));
    if (rho == Scalar(0)) return absorbing();
    if (std::isinf(rho)) return reflecting();
    return Stickiness(Kind::Finite, rho);
  }
  static Stickiness absorbing() { return Stickiness(Kind::Absorbing, Scalar(0)); }
  static Stickiness reflecting() {
    return Stickiness(Kind::Reflecting, std::numeric_limits<Scalar>::infinity());
  }

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::Finite; }
  bool is_absorbing() const noexcept { return kind_ == Kind::Absorbing; }
  bool is_reflecting() const noexcept { return kind_ == Kind::Reflecting; }

  /// rho itself; 0 for the absorbing tag and +inf for the reflecting tag.
  Scalar value() const noexcept { return value_; }

 private:
  Stickiness(Kind kind, Scalar value) : kind_(kind), value_(value) {}

  Kind kind_;
  Scalar value_;
};

template <typename Scalar>
struct Coefficients {
  Scalar mu;
  Scalar sigma2;
  Scalar k;
};

/// A one-dimensional diffusion on [l, r] with a sticky left boundary and a
/// killing right boundary:
///
///   dX = mu(X) 1{X > l} dt + rho 1{X = l} dt + sigma(X) 1{X > l} dB,
///
/// discounted (killed) at rate k(X). Coefficients are arbitrary callables;
/// construction samples them on a uniform lattice and rejects sigma^2 <= 0 or
/// k < 0 at any sample.
template <typename Scalar>
class DiffusionSpec {
 public:
  using Function = std::function<Scalar(Scalar)>;

  static constexpr int kValidationSamples = 257;

  DiffusionSpec(Function drift, Function volatility, Function kill_rate,
                Stickiness<Scalar> stickiness, Scalar left, Scalar right,
                std::vector<Scalar> nonsmooth_points = {})
      : drift_(std::move(drift)),
        volatility_(std::move(volatility)),
        kill_rate_(std::move(kill_rate)),
        stickiness_(stickiness),
        left_(left),
        right_(right),
        nonsmooth_(std::move(nonsmooth_points)) {
    if (!drift_ || !volatility_ || !kill_rate_)
      throw InvalidArgument("diffusion coefficients must be callable");
    if (!std::isfinite(left_) || !std::isfinite(right_) || !(left_ < right_))
      throw InvalidArgument("boundaries must be finite with l < r");
    for (Scalar xi : nonsmooth_)
      if (!(xi > left_ && xi < right_))
        throw InvalidArgument("nonsmooth point outside (l, r)");
    for (int s = 0; s < kValidationSamples; ++s) {
      const Scalar x = left_ + (right_ - left_) * Scalar(s) / Scalar(kValidationSamples - 1);
      const Scalar sig = volatility_(x);
      if (!(sig * sig > Scalar(0)))
        throw InvalidArgument("sigma^2 must be positive on [l, r]; fails at x = " +
                              std::to_string(double(x)));
      const Scalar k = kill_rate_(x);
      if (!(k >= Scalar(0)))
        throw InvalidArgument("kill rate must be nonnegative on [l, r]; fails at x = " +
                              std::to_string(double(x)));
      if (!std::isfinite(drift_(x)))
        throw InvalidArgument("drift is not finite at x = " + std::to_string(double(x)));
    }
  }

  Scalar drift(Scalar x) const { return drift_(x); }
  Scalar volatility(Scalar x) const { return volatility_(x); }
  Scalar kill_rate(Scalar x) const { return kill_rate_(x); }
  const Stickiness<Scalar>& stickiness() const noexcept { return stickiness_; }
  Scalar left_boundary() const noexcept { return left_; }
  Scalar right_boundary() const noexcept { return right_; }
  const std::vector<Scalar>& nonsmooth_points() const noexcept { return nonsmooth_; }

  /// Same diffusion with k == 0; used for passage-time problems.
  DiffusionSpec without_killing() const {
    return DiffusionSpec(drift_, volatility_, [](Scalar) { return Scalar(0); }, stickiness_,
                         left_, right_, nonsmooth_);
  }

  DiffusionSpec with_stickiness(Stickiness<Scalar> s) const {
    return DiffusionSpec(drift_, volatility_, kill_rate_, s, left_, right_, nonsmooth_);
  }

 private:
  Function drift_;
  Function volatility_;
  Function kill_rate_;
  Stickiness<Scalar> stickiness_;
  Scalar left_;
  Scalar right_;
  std::vector<Scalar> nonsmooth_;
};

/// (mu(x), sigma(x)^2, k(x)) for l <= x <= r.
template <typename Scalar>
Coefficients<Scalar> evaluate_coefficients(const DiffusionSpec<Scalar>& spec, Scalar x) {
  if (!(x >= spec.left_boundary() && x <= spec.right_boundary()))
    throw InvalidArgument("state " + std::to_string(double(x)) + " outside [l, r]");
  const Scalar sig = spec.volatility(x);
  return {spec.drift(x), sig * sig, spec.kill_rate(x)};
}

/// Sticky Ornstein-Uhlenbeck short rate: mu(x) = kappa (theta - x), constant
/// sigma, killing k(x) = x, sticky at 0.
template <typename Scalar>
struct StickyOUParams {
  Scalar kappa;
  Scalar theta;
  Scalar sigma;
  Scalar rho;
  Scalar x0;
};

template <typename Scalar>
DiffusionSpec<Scalar> sticky_ou_spec(const StickyOUParams<Scalar>& p, Scalar r_localized = Scalar(1)) {
  if (!(p.kappa > Scalar(0))) throw InvalidArgument("kappa must be positive");
  if (!(p.sigma > Scalar(0))) throw InvalidArgument("sigma must be positive");
  if (!(r_localized > Scalar(0))) throw InvalidArgument("localization bound r must be positive");
  if (!(r_localized > p.theta)) throw InvalidArgument("localization bound r must exceed theta");
  if (!(p.x0 >= Scalar(0) && p.x0 < r_localized))
    throw InvalidArgument("initial rate x0 must lie in [0, r)");
  const Scalar kappa = p.kappa, theta = p.theta, sigma = p.sigma;
  return DiffusionSpec<Scalar>(
      [kappa, theta](Scalar x) { return kappa * (theta - x); },
      [sigma](Scalar) { return sigma; },
      [](Scalar x) { return x; },
      Stickiness<Scalar>::finite(p.rho), Scalar(0), r_localized);
}

/// The three parameter sets used for the yield-curve experiments.
template <typename Scalar = double>
StickyOUParams<Scalar> sticky_ou_preset(int model) {
  switch (model) {
    case 1: return {Scalar(0.45), Scalar(0.1), Scalar(0.05), Scalar(4.0e-3), Scalar(0.01)};
    case 2: return {Scalar(0.75), Scalar(0.05), Scalar(0.015), Scalar(1.0e-6), Scalar(0.001)};
    case 3: return {Scalar(0.221), Scalar(0.2), Scalar(0.017), Scalar(5.8e-5), Scalar(0.0)};
    default: throw InvalidArgument("unknown model preset " + std::to_string(model) + " (expected 1, 2 or 3)");
  }
}

}  // namespace sticky
