#pragma once

#include "sticky/errors.hpp"
#include "sticky/generator.hpp"
#include "sticky/model.hpp"
#include "sticky/numerics.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace sticky {

/// Seedable uniform stream; (seed, stream) pairs give independent
/// sequences, so paths or workers can each own a split. Normals come from
/// inversion of a uniform through normal_quantile (relative accuracy about
/// 1e-15), exponentials from -log U.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) : key_{seed, stream} { reseed(); }

  /// Independent child stream; depends only on this stream's key and `id`.
  RandomStream split(std::uint64_t id) const {
    RandomStream child(*this, id);
    return child;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    for (;;) {
      const double u = double(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  double normal() { return normal_quantile(uniform()); }
  double exponential() { return -std::log(uniform()); }

 private:
  RandomStream(const RandomStream& parent, std::uint64_t id) : key_(parent.key_) {
    key_.push_back(id);
    reseed();
  }

  void reseed() {
    std::vector<std::uint32_t> words;
    for (std::uint64_t k : key_) {
      words.push_back(std::uint32_t(k));
      words.push_back(std::uint32_t(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  std::vector<std::uint64_t> key_;
  std::mt19937_64 engine_;
};

/// One simulated path on [0, T]. `states[k]` is held on [times[k],
/// times[k+1]). For chain paths `indices` holds the grid indices. A killed
/// path ends with the cemetery at `kill_time`.
struct PathSample {
  std::vector<double> times;
  std::vector<double> states;
  std::vector<Index> indices;
  bool killed = false;
  double kill_time = std::numeric_limits<double>::infinity();
  double horizon = 0.0;

  bool alive_at(double t) const { return t < kill_time; }

  /// State at time t <= horizon, right-continuous; only meaningful when
  /// alive_at(t).
  double state_at(double t) const {
    if (!(t >= 0.0 && t <= horizon)) throw InvalidArgument("path queried outside [0, T]");
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return states[std::size_t(it - times.begin()) - 1];
  }

  Index index_at(double t) const {
    if (indices.empty()) throw InvalidArgument("path carries no grid indices");
    if (!(t >= 0.0 && t <= horizon)) throw InvalidArgument("path queried outside [0, T]");
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return indices[std::size_t(it - times.begin()) - 1];
  }

  bool alive_at_horizon() const { return alive_at(horizon); }
  double terminal_state() const { return state_at(horizon); }
};

/// Exact simulation of the chain: exponential holding time with rate
/// |G[i,i]|, then a move to x_{i-1}, x_{i+1} or the cemetery with
/// probabilities proportional to G[i,i-1], G[i,i+1] and k(x_i) (plus the
/// upper leak in row n).
template <typename Scalar>
PathSample sample_ctmc_path(const GeneratorMatrix<Scalar>& gen, Index start, double horizon, RandomStream& rng) {
  const auto& grid = gen.require_grid();
  if (gen.has_negative_rates())
    throw NegativeRateError(gen.negative_rate_rows.front(), "cannot simulate a chain with negative rates");
  if (start < 0 || start >= gen.size()) throw OffGridError("initial state is not a chain state");
  if (!(horizon >= 0.0)) throw InvalidArgument("horizon must be nonnegative");

  PathSample path;
  path.horizon = horizon;
  Index i = start;
  double t = 0.0;
  path.times.push_back(0.0);
  path.states.push_back(double(grid.point(i)));
  path.indices.push_back(i);
  const Index last = gen.size() - 1;
  for (;;) {
    const double rate = -double(gen.diag[i]);
    if (!(rate > 0.0)) break;
    t += rng.exponential() / rate;
    if (t > horizon) break;
    const double down = i > 0 ? double(gen.sub[i]) : 0.0;
    const double up = i < last ? double(gen.sup[i]) : 0.0;
    const double u = rng.uniform() * rate;
    if (u < down) {
      --i;
    } else if (u < down + up) {
      ++i;
    } else {
      path.killed = true;
      path.kill_time = t;
      break;
    }
    path.times.push_back(t);
    path.states.push_back(double(grid.point(i)));
    path.indices.push_back(i);
  }
  return path;
}

/// Euler scheme with the sticky boundary and exponential killing as used
/// for the comparison with chain sampling:
///
///   Z = X + mu(X) dt + sigma(X) sqrt(dt) xi   if X > l
///   Z = l + rho dt                            if X = l
///
/// then with e ~ Exp(1): cemetery if e <= k(X) dt, otherwise X = max(Z, l).
/// The killing check comes before acceptance.
template <typename Scalar>
PathSample sample_euler_path(const DiffusionSpec<Scalar>& spec, double x0, double horizon, RandomStream& rng,
                             double dt = 1.0 / 600.0) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
  if (!(horizon >= 0.0)) throw InvalidArgument("horizon must be nonnegative");
  const double l = double(spec.left_boundary());
  if (!(x0 >= l && x0 <= double(spec.right_boundary()))) throw InvalidArgument("initial state outside [l, r]");
  const auto& st = spec.stickiness();
  if (st.is_reflecting()) throw InvalidArgument("Euler scheme needs a finite stickiness");
  const double rho = double(st.value());

  PathSample path;
  path.horizon = horizon;
  path.times.push_back(0.0);
  path.states.push_back(x0);
  const auto steps = static_cast<long long>(std::llround(horizon / dt));
  const double h = steps > 0 ? horizon / double(steps) : 0.0;
  const double sqrt_h = std::sqrt(h);
  double x = x0;
  for (long long s = 1; s <= steps; ++s) {
    double z;
    if (x > l) {
      const double xi = rng.normal();
      z = x + double(spec.drift(Scalar(x))) * h + double(spec.volatility(Scalar(x))) * sqrt_h * xi;
    } else {
      z = l + rho * h;
    }
    const double e = rng.exponential();
    const double t = double(s) * h;
    if (e <= double(spec.kill_rate(Scalar(x))) * h) {
      path.killed = true;
      path.kill_time = t;
      break;
    }
    x = z > l ? z : l;
    path.times.push_back(t);
    path.states.push_back(x);
  }
  return path;
}

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double level = 0.99;
  double lo = 0.0;
  double hi = 0.0;
  long long paths = 0;

  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Mean, standard error and normal-quantile interval of a sample. The sum
/// is compensated and taken about the first observation, so a constant
/// sample gives that constant with zero error.
inline MCEstimate summarize_sample(const std::vector<double>& values, double level = 0.99) {
  if (values.size() < 2) throw InvalidArgument("Monte Carlo estimate needs at least two paths");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
  const double shift = values.front();
  CompensatedSum<double> s1, s2;
  for (double v : values) {
    s1.add(v - shift);
    s2.add((v - shift) * (v - shift));
  }
  const double count = double(values.size());
  const double d = s1.value() / count;
  const double var = std::max(0.0, (s2.value() - count * d * d) / (count - 1.0));
  MCEstimate est;
  est.mean = shift + d;
  est.std_error = std::sqrt(var / count);
  est.level = level;
  const double z = normal_quantile(0.5 + level / 2.0);
  est.lo = est.mean - z * est.std_error;
  est.hi = est.mean + z * est.std_error;
  est.paths = static_cast<long long>(values.size());
  return est;
}

/// Monte Carlo value of E[f(X_T) 1{not killed}]; path p draws from
/// rng.split(p), so results do not depend on evaluation order.
inline MCEstimate mc_estimate(const std::function<PathSample(RandomStream&)>& sampler,
                              const std::function<double(double)>& payoff, long long n_paths, double level,
                              const RandomStream& rng) {
  if (n_paths < 2) throw InvalidArgument("Monte Carlo estimate needs at least two paths");
  std::vector<double> values(static_cast<std::size_t>(n_paths));
  for (long long p = 0; p < n_paths; ++p) {
    RandomStream local = rng.split(std::uint64_t(p));
    const PathSample path = sampler(local);
    values[std::size_t(p)] = path.alive_at_horizon() ? payoff(path.terminal_state()) : 0.0;
  }
  return summarize_sample(values, level);
}

/// Zero-coupon bond estimates at several maturities from one set of paths
/// simulated to max(maturities): the payoff at T is 1{alive at T}.
inline std::vector<MCEstimate> mc_survival_curve(const std::function<PathSample(RandomStream&)>& sampler,
                                                 const std::vector<double>& maturities, long long n_paths,
                                                 double level, const RandomStream& rng) {
  if (n_paths < 2) throw InvalidArgument("Monte Carlo estimate needs at least two paths");
  std::vector<std::vector<double>> values(maturities.size(), std::vector<double>(std::size_t(n_paths)));
  for (long long p = 0; p < n_paths; ++p) {
    RandomStream local = rng.split(std::uint64_t(p));
    const PathSample path = sampler(local);
    for (std::size_t m = 0; m < maturities.size(); ++m) values[m][std::size_t(p)] = path.alive_at(maturities[m]) ? 1.0 : 0.0;
  }
  std::vector<MCEstimate> out;
  out.reserve(maturities.size());
  for (const auto& v : values) out.push_back(summarize_sample(v, level));
  return out;
}

}  // namespace sticky
