#include "osmax/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>

#include "osmax/errors.hpp"

namespace osmax {

std::string_view to_string(GridRegime regime) {
  switch (regime) {
    case GridRegime::Sparse: return "sparse";
    case GridRegime::Pickands: return "pickands";
    case GridRegime::Dense: return "dense";
  }
  return "unknown";
}

GridRegime parse_regime(std::string_view name) {
  if (name == "sparse") return GridRegime::Sparse;
  if (name == "pickands") return GridRegime::Pickands;
  if (name == "dense") return GridRegime::Dense;
  throw ConfigError("unknown grid regime '" + std::string(name) + "'");
}

double regime_scale(double T, int m, double alpha) {
  if (!(T > 1.0)) throw DomainError("regime scale needs T > 1");
  return std::pow(2.0 / m * std::log(T), 1.0 / alpha);
}

GridSpec make_aligned_grid(GridRegime regime, double param, double T, int m, double alpha,
                           const LatticeSpec& lattice) {
  if (!(param > 0.0)) throw DomainError("grid parameter must be positive");
  const double scale = regime_scale(T, m, alpha);
  const double target = param / scale;
  GridSpec g{regime, 0.0, 0.0, T, m, alpha};
  double k = std::max(1.0, std::round(target / lattice.delta));
  switch (regime) {
    case GridRegime::Sparse:
      if (param < 10.0) throw RegimeMismatch("sparse grid needs ratio >= 10");
      while (k * lattice.delta * scale < 10.0) k += 1.0;
      break;
    case GridRegime::Dense:
      if (param > 0.1) throw RegimeMismatch("dense grid needs ratio <= 0.1");
      k = std::max(1.0, std::floor(target / lattice.delta * (1.0 + 1e-9)));
      if (k * lattice.delta * scale > 0.1 * (1.0 + 1e-9))
        throw RegimeMismatch("lattice too coarse for a dense grid with ratio <= 0.1");
      break;
    case GridRegime::Pickands:
      if (std::abs(k * lattice.delta - target) > 1e-9 * target)
        throw StepMismatch("Pickands grid step d is not a multiple of the lattice step");
      g.d = param;
      break;
  }
  g.p = k * lattice.delta;
  if (regime == GridRegime::Pickands) g.p = target;
  return g;
}

std::size_t grid_stride(const GridSpec& grid, const LatticeSpec& lattice) noexcept {
  const double k = std::round(grid.p / lattice.delta);
  if (k < 1.0 || std::abs(k * lattice.delta - grid.p) > 1e-9 * grid.p) return 0;
  return static_cast<std::size_t>(k);
}

std::vector<double> order_stat_path(std::span<const std::span<const double>> paths, int m) {
  const std::size_t n = paths.size();
  if (n == 0) throw DimensionMismatch("order statistics need at least one path");
  if (m < 1 || static_cast<std::size_t>(m) > n)
    throw DimensionMismatch("order statistic index m must lie in [1, n]");
  const std::size_t len = paths[0].size();
  for (const auto& p : paths)
    if (p.size() != len) throw DimensionMismatch("paths do not share one lattice");

  std::vector<double> out(len);
  if (m == 1) {
    std::copy(paths[0].begin(), paths[0].end(), out.begin());
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t k = 0; k < len; ++k) out[k] = std::max(out[k], paths[i][k]);
    return out;
  }
  if (static_cast<std::size_t>(m) == n) {
    std::copy(paths[0].begin(), paths[0].end(), out.begin());
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t k = 0; k < len; ++k) out[k] = std::min(out[k], paths[i][k]);
    return out;
  }
  std::vector<double> column(n);
  const auto nth = column.begin() + (m - 1);
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t i = 0; i < n; ++i) column[i] = paths[i][k];
    std::nth_element(column.begin(), nth, column.end(), std::greater<>());
    out[k] = *nth;
  }
  return out;
}

std::vector<double> order_stat_path(std::span<const GaussianPath> paths, int m) {
  std::vector<std::span<const double>> views;
  views.reserve(paths.size());
  for (const auto& p : paths) {
    if (!paths.empty() && (p.lattice.n_points != paths[0].lattice.n_points ||
                           p.lattice.delta != paths[0].lattice.delta))
      throw DimensionMismatch("paths do not share one lattice");
    views.emplace_back(p.values);
  }
  return order_stat_path(std::span<const std::span<const double>>(views), m);
}

MaximaSample maxima_pair(std::span<const double> osp, const LatticeSpec& lattice,
                         const GridSpec& grid) {
  if (osp.size() != lattice.n_points) throw DimensionMismatch("order statistic path length != lattice");
  if (!(grid.p > 0.0)) throw GridOutOfRange("grid step must be positive");
  const double horizon = lattice.horizon();
  const double T = grid.T > 0.0 ? grid.T : horizon;
  if (T > horizon + 0.5 * lattice.delta)
    throw GridOutOfRange("grid horizon " + std::to_string(T) + " exceeds lattice horizon " +
                         std::to_string(horizon));

  MaximaSample s;
  s.T = T;
  s.m = grid.m;
  s.regime = grid.regime;
  const double limit = T / lattice.delta * (1.0 + 1e-12);
  const std::size_t last =
      std::min(osp.size(), static_cast<std::size_t>(std::floor(limit)) + 1);
  s.m_cont = *std::max_element(osp.begin(), osp.begin() + static_cast<std::ptrdiff_t>(last));

  double best = -std::numeric_limits<double>::infinity();
  if (const std::size_t stride = grid_stride(grid, lattice); stride > 0) {
    for (std::size_t k = 0; k < last; k += stride) best = std::max(best, osp[k]);
  } else {
    for (std::size_t j = 0;; ++j) {
      const double t = static_cast<double>(j) * grid.p;
      if (t > T * (1.0 + 1e-12)) break;
      const auto k = static_cast<std::size_t>(std::llround(t / lattice.delta));
      if (k >= osp.size()) break;
      best = std::max(best, osp[k]);
    }
  }
  s.m_grid = best;
  return s;
}

void write_maxima_header(std::ostream& os) { os << "T,m,n,regime,m_cont,m_grid,seed\n"; }

void write_maxima_row(std::ostream& os, const MaximaSample& s) {
  const auto old_precision = os.precision(17);
  os << s.T << ',' << s.m << ',' << s.n << ',' << to_string(s.regime) << ',' << s.m_cont << ','
     << s.m_grid << ',' << s.seed << '\n';
  os.precision(old_precision);
}

}  // namespace osmax
