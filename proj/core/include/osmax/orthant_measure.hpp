#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace osmax {

/// A finite set of points in R^m, stored row-major. Each point p stands for the
/// lower orthant {w : w_i < p_i for all i}.
class OrthantPointSet {
 public:
  explicit OrthantPointSet(int dim);
  OrthantPointSet(int dim, std::vector<double> row_major);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const noexcept { return coords_.empty(); }

  void add(std::span<const double> point);
  std::span<const double> point(std::size_t k) const noexcept {
    return {coords_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double coord(std::size_t k, int i) const noexcept {
    return coords_[k * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i)];
  }
  void reserve(std::size_t points) { coords_.reserve(points * static_cast<std::size_t>(dim_)); }
  void clear() noexcept { coords_.clear(); }

 private:
  int dim_;
  std::vector<double> coords_;
};

/// Measure of the union of lower orthants under the density exp(w_1 + ... + w_m).
///
/// Exact sweep: points are ordered by their last coordinate, and between two
/// consecutive levels the slice of the union is the (m-1)-dimensional union of
/// the points already passed. m = 1 reduces to exp(max), m = 2 to a running
/// maximum. Cost is O(K log K) for m <= 2 and O(K^(m-1) log K) beyond.
double orthant_union_exp_measure(const OrthantPointSet& points);

/// Measure of (union over a) intersected with (union over b) under the same
/// density, computed by one sweep that keeps both active sets. No subtraction
/// of overlapping measures is involved.
double orthant_intersection_exp_measure(const OrthantPointSet& a, const OrthantPointSet& b);

}  // namespace osmax
