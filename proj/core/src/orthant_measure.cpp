#include "osmax/orthant_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "osmax/errors.hpp"

namespace osmax {

namespace {

using Index = std::vector<std::size_t>;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sweeps accumulate in extended precision and round once at the end, so that
// nested point sets give ordered measures in double as well.
using Real = long double;

// exp(v) - exp(next) for v >= next, without cancellation when next is close to v.
Real slab_weight(double v, double next) {
  if (next == kNegInf) return std::exp(static_cast<Real>(v));
  return std::exp(static_cast<Real>(v)) * -std::expm1(static_cast<Real>(next) - static_cast<Real>(v));
}

double max_coord(const OrthantPointSet& pts, const Index& idx, int axis) {
  double best = kNegInf;
  for (auto k : idx) best = std::max(best, pts.coord(k, axis));
  return best;
}

// Union measure in the first `dim` coordinates of the indexed points.
Real union_measure(const OrthantPointSet& pts, Index idx, int dim) {
  if (idx.empty()) return 0.0L;
  if (dim == 1) return std::exp(static_cast<Real>(max_coord(pts, idx, 0)));

  const int axis = dim - 1;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return pts.coord(a, axis) > pts.coord(b, axis); });

  Real total = 0.0L;
  double running = kNegInf;  // dim == 2: max of the first coordinate over active points
  Index active;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const double level = pts.coord(idx[j], axis);
    if (dim == 2) running = std::max(running, pts.coord(idx[j], 0));
    else active.push_back(idx[j]);
    const double next = j + 1 < idx.size() ? pts.coord(idx[j + 1], axis) : kNegInf;
    if (next == level) continue;
    if (dim == 2) total += std::exp(static_cast<Real>(running)) * slab_weight(level, next);
    else total += union_measure(pts, active, dim - 1) * slab_weight(level, next);
  }
  return total;
}

struct Tagged {
  std::size_t index;
  bool from_a;
};

Real intersection_measure(const OrthantPointSet& a, const Index& ia, const OrthantPointSet& b,
                          const Index& ib, int dim) {
  if (ia.empty() || ib.empty()) return 0.0L;
  if (dim == 1) return std::exp(static_cast<Real>(std::min(max_coord(a, ia, 0), max_coord(b, ib, 0))));

  const int axis = dim - 1;
  std::vector<Tagged> events;
  events.reserve(ia.size() + ib.size());
  for (auto k : ia) events.push_back({k, true});
  for (auto k : ib) events.push_back({k, false});
  auto level_of = [&](const Tagged& e) {
    return e.from_a ? a.coord(e.index, axis) : b.coord(e.index, axis);
  };
  std::sort(events.begin(), events.end(),
            [&](const Tagged& x, const Tagged& y) { return level_of(x) > level_of(y); });

  Real total = 0.0L;
  double run_a = kNegInf, run_b = kNegInf;
  Index active_a, active_b;
  for (std::size_t j = 0; j < events.size(); ++j) {
    const auto& e = events[j];
    const double level = level_of(e);
    if (dim == 2) {
      if (e.from_a) run_a = std::max(run_a, a.coord(e.index, 0));
      else run_b = std::max(run_b, b.coord(e.index, 0));
    } else {
      (e.from_a ? active_a : active_b).push_back(e.index);
    }
    const double next = j + 1 < events.size() ? level_of(events[j + 1]) : kNegInf;
    if (next == level) continue;
    if (dim == 2) {
      if (run_a != kNegInf && run_b != kNegInf)
        total += std::exp(static_cast<Real>(std::min(run_a, run_b))) * slab_weight(level, next);
    } else if (!active_a.empty() && !active_b.empty()) {
      total += intersection_measure(a, active_a, b, active_b, dim - 1) * slab_weight(level, next);
    }
  }
  return total;
}

Index all_indices(std::size_t n) {
  Index idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

OrthantPointSet::OrthantPointSet(int dim) : dim_(dim) {
  if (dim < 1) throw DimensionMismatch("orthant dimension must be >= 1");
}

OrthantPointSet::OrthantPointSet(int dim, std::vector<double> row_major)
    : dim_(dim), coords_(std::move(row_major)) {
  if (dim < 1) throw DimensionMismatch("orthant dimension must be >= 1");
  if (coords_.size() % static_cast<std::size_t>(dim) != 0)
    throw DimensionMismatch("coordinate count is not a multiple of the dimension");
}

void OrthantPointSet::add(std::span<const double> point) {
  if (point.size() != static_cast<std::size_t>(dim_)) throw DimensionMismatch("point has wrong dimension");
  coords_.insert(coords_.end(), point.begin(), point.end());
}

double orthant_union_exp_measure(const OrthantPointSet& points) {
  return static_cast<double>(union_measure(points, all_indices(points.size()), points.dim()));
}

double orthant_intersection_exp_measure(const OrthantPointSet& a, const OrthantPointSet& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("orthant sets differ in dimension");
  return static_cast<double>(intersection_measure(a, all_indices(a.size()), b, all_indices(b.size()), a.dim()));
}

}  // namespace osmax
