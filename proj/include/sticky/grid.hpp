#pragma once

#include "sticky/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace sticky {

/// Discretization points x_0 = l < x_1 < ... < x_{n+1} = r with the
/// one-sided spacings d+x_i = x_{i+1} - x_i, d-x_i = x_i - x_{i-1} and their
/// average. At the ends x_0^- = x_0 and x_{n+1}^+ = x_{n+1}, so d-x_0 and
/// d+x_{n+1} are zero.
template <typename Scalar>
class Grid {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  static constexpr double kDefaultRatioBound = 10.0;

  explicit Grid(Vector points, Scalar ratio_bound = Scalar(kDefaultRatioBound))
      : points_(std::move(points)), ratio_bound_(ratio_bound) {
    const Index size = points_.size();
    if (size < 3) throw InvalidArgument("grid needs at least one interior point");
    for (Index i = 0; i < size; ++i)
      if (!std::isfinite(points_[i])) throw InvalidArgument("grid point is not finite");
    for (Index i = 0; i + 1 < size; ++i)
      if (!(points_[i + 1] > points_[i]))
        throw InvalidArgument("grid points must be strictly increasing (index " + std::to_string(i) + ")");

    delta_plus_ = Vector::Zero(size);
    delta_minus_ = Vector::Zero(size);
    for (Index i = 0; i + 1 < size; ++i) delta_plus_[i] = points_[i + 1] - points_[i];
    for (Index i = 1; i < size; ++i) delta_minus_[i] = points_[i] - points_[i - 1];
    delta_avg_ = (delta_plus_ + delta_minus_) / Scalar(2);

    const auto cells = delta_plus_.head(size - 1);
    mesh_ = cells.maxCoeff();
    ratio_ = mesh_ / cells.minCoeff();
    if (ratio_ > ratio_bound_)
      throw InvalidArgument("grid spacing ratio " + std::to_string(double(ratio_)) +
                            " exceeds bound " + std::to_string(double(ratio_bound_)));
  }

  /// Number of interior points n.
  Index interior_count() const noexcept { return points_.size() - 2; }
  /// Number of points n + 2, both boundaries included.
  Index size() const noexcept { return points_.size(); }

  const Vector& points() const noexcept { return points_; }
  Scalar point(Index i) const { return points_[i]; }
  Scalar left() const { return points_[0]; }
  Scalar right() const { return points_[points_.size() - 1]; }

  const Vector& delta_plus() const noexcept { return delta_plus_; }
  const Vector& delta_minus() const noexcept { return delta_minus_; }
  const Vector& delta_avg() const noexcept { return delta_avg_; }
  Scalar delta_plus(Index i) const { return delta_plus_[i]; }
  Scalar delta_minus(Index i) const { return delta_minus_[i]; }
  Scalar delta_avg(Index i) const { return delta_avg_[i]; }

  /// h_n = max_i d+x_i.
  Scalar mesh() const noexcept { return mesh_; }
  Scalar spacing_ratio() const noexcept { return ratio_; }
  Scalar ratio_bound() const noexcept { return ratio_bound_; }

  /// Index of x if it is exactly a grid point.
  std::optional<Index> index_of(Scalar x) const {
    const auto* begin = points_.data();
    const auto* end = begin + points_.size();
    const auto* it = std::lower_bound(begin, end, x);
    if (it != end && *it == x) return Index(it - begin);
    return std::nullopt;
  }

  /// Index i with x_i <= x < x_{i+1}; the last cell also takes x = r.
  Index cell_of(Scalar x) const {
    if (!(x >= left() && x <= right())) throw InvalidArgument("state outside grid");
    const auto* begin = points_.data();
    const auto* end = begin + points_.size();
    Index i = Index(std::upper_bound(begin, end, x) - begin) - 1;
    return std::min(i, size() - 2);
  }

 private:
  Vector points_;
  Vector delta_plus_;
  Vector delta_minus_;
  Vector delta_avg_;
  Scalar mesh_{};
  Scalar ratio_{};
  Scalar ratio_bound_;
};

namespace detail {

template <typename Scalar>
void check_interval(Scalar l, Scalar r) {
  if (!std::isfinite(l) || !std::isfinite(r) || !(l < r))
    throw InvalidArgument("grid interval must satisfy l < r");
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> uniform_points(Scalar l, Scalar r, Index n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(n + 2);
  for (Index i = 0; i <= n + 1; ++i) x[i] = l + (r - l) * Scalar(i) / Scalar(n + 1);
  x[n + 1] = r;
  return x;
}

}  // namespace detail

/// n interior points, all cells equal to (r - l) / (n + 1).
template <typename Scalar>
Grid<Scalar> build_uniform(Scalar l, Scalar r, Index n,
                           Scalar ratio_bound = Scalar(Grid<Scalar>::kDefaultRatioBound)) {
  detail::check_interval(l, r);
  if (n < 2) throw InvalidArgument("uniform grid needs n >= 2 interior points");
  return Grid<Scalar>(detail::uniform_points(l, r, n), ratio_bound);
}

/// Uniform grid except that the cell containing xi is shifted so that xi is
/// its exact midpoint. Only the two neighbouring cells change length. A
/// payoff discontinuity at xi then keeps second-order convergence.
template <typename Scalar>
Grid<Scalar> build_with_midpoint_anchor(Scalar l, Scalar r, Index n, Scalar xi,
                                        Scalar ratio_bound = Scalar(Grid<Scalar>::kDefaultRatioBound)) {
  detail::check_interval(l, r);
  if (n < 2) throw InvalidArgument("grid needs n >= 2 interior points");
  if (!(xi > l && xi < r)) throw InvalidArgument("anchor point must lie in (l, r)");

  auto x = detail::uniform_points(l, r, n);
  const Index last = n + 1;
  Index k = Index(std::upper_bound(x.data(), x.data() + x.size(), xi) - x.data()) - 1;
  k = std::clamp<Index>(k, 0, last - 1);
  if ((x[k] + x[k + 1]) / Scalar(2) == xi) return Grid<Scalar>(std::move(x), ratio_bound);

  if (k == 0) {
    x[1] = Scalar(2) * xi - l;
  } else if (k + 1 == last) {
    x[k] = Scalar(2) * xi - r;
  } else {
    const Scalar half = (x[k + 1] - x[k]) / Scalar(2);
    x[k] = xi - half;
    x[k + 1] = xi + half;
  }
  return Grid<Scalar>(std::move(x), ratio_bound);
}

/// Grid with z as an exact node: uniform on [l, z] and on [z, r], with the
/// split chosen so that both spacings are as close as possible to the
/// uniform spacing. Returns the uniform grid when z already lies on it.
template <typename Scalar>
Grid<Scalar> build_with_node(Scalar l, Scalar r, Index n, Scalar z,
                             Scalar ratio_bound = Scalar(Grid<Scalar>::kDefaultRatioBound)) {
  detail::check_interval(l, r);
  if (n < 2) throw InvalidArgument("grid needs n >= 2 interior points");
  if (!(z > l && z < r)) throw InvalidArgument("node must lie in (l, r)");

  auto uniform = detail::uniform_points(l, r, n);
  if (std::binary_search(uniform.data(), uniform.data() + uniform.size(), z))
    return Grid<Scalar>(std::move(uniform), ratio_bound);

  const Scalar h = (r - l) / Scalar(n + 1);
  const Index left_cells =
      std::clamp<Index>(static_cast<Index>(std::llround(double((z - l) / h))), 1, n);
  const Index right_cells = n + 1 - left_cells;

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(n + 2);
  for (Index i = 0; i < left_cells; ++i) x[i] = l + (z - l) * Scalar(i) / Scalar(left_cells);
  for (Index i = 0; i < right_cells; ++i)
    x[left_cells + i] = z + (r - z) * Scalar(i) / Scalar(right_cells);
  x[n + 1] = r;
  return Grid<Scalar>(std::move(x), ratio_bound);
}

/// Grid through several exact nodes: uniform on each segment between
/// consecutive nodes, n + 1 cells in total, each segment getting a cell
/// count proportional to its length (at least one). With a single node
/// this is build_with_node.
template <typename Scalar>
Grid<Scalar> build_with_nodes(Scalar l, Scalar r, Index n, std::vector<Scalar> nodes,
                              Scalar ratio_bound = Scalar(Grid<Scalar>::kDefaultRatioBound)) {
  detail::check_interval(l, r);
  if (n < 2) throw InvalidArgument("grid needs n >= 2 interior points");
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  for (Scalar z : nodes)
    if (!(z > l && z < r)) throw InvalidArgument("node must lie in (l, r)");

  auto uniform = detail::uniform_points(l, r, n);
  std::vector<Scalar> missing;
  for (Scalar z : nodes)
    if (!std::binary_search(uniform.data(), uniform.data() + uniform.size(), z)) missing.push_back(z);
  if (missing.empty()) return Grid<Scalar>(std::move(uniform), ratio_bound);
  if (nodes.size() == 1) return build_with_node(l, r, n, nodes.front(), ratio_bound);

  std::vector<Scalar> bounds{l};
  bounds.insert(bounds.end(), nodes.begin(), nodes.end());
  bounds.push_back(r);
  const std::size_t segments = bounds.size() - 1;
  if (Index(segments) > n + 1) throw InvalidArgument("more nodes than grid cells");

  const Scalar h = (r - l) / Scalar(n + 1);
  std::vector<Index> cells(segments);
  Index total = 0;
  for (std::size_t s = 0; s < segments; ++s) {
    cells[s] = std::max<Index>(1, static_cast<Index>(std::floor(double((bounds[s + 1] - bounds[s]) / h))));
    total += cells[s];
  }
  auto spacing = [&](std::size_t s) { return (bounds[s + 1] - bounds[s]) / Scalar(cells[s]); };
  while (total < n + 1) {
    std::size_t widest = 0;
    for (std::size_t s = 1; s < segments; ++s)
      if (spacing(s) > spacing(widest)) widest = s;
    ++cells[widest];
    ++total;
  }
  while (total > n + 1) {
    std::size_t narrowest = segments;
    for (std::size_t s = 0; s < segments; ++s)
      if (cells[s] > 1 && (narrowest == segments || spacing(s) < spacing(narrowest))) narrowest = s;
    --cells[narrowest];
    --total;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(n + 2);
  Index k = 0;
  for (std::size_t s = 0; s < segments; ++s)
    for (Index i = 0; i < cells[s]; ++i)
      x[k++] = bounds[s] + (bounds[s + 1] - bounds[s]) * Scalar(i) / Scalar(cells[s]);
  x[n + 1] = r;
  return Grid<Scalar>(std::move(x), ratio_bound);
}

}  // namespace sticky
