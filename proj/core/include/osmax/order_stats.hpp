#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "osmax/synthesis.hpp"

namespace osmax {

enum class GridRegime { Sparse, Pickands, Dense };

std::string_view to_string(GridRegime regime);
GridRegime parse_regime(std::string_view name);

/// (2/m ln T)^{1/alpha}: the time scale on which the regimes are classified.
double regime_scale(double T, int m, double alpha);

/// Uniform sampling grid {k p : k = 0, 1, ...} on [0, T].
struct GridSpec {
  GridRegime regime = GridRegime::Sparse;
  double p = 1.0;
  double d = 0.0;  // Pickands regime only
  double T = 0.0;
  int m = 1;
  double alpha = 1.0;

  /// p (2/m ln T)^{1/alpha}; the finite-T stand-in for the limit D.
  double scaled_step() const { return p * regime_scale(T, m, alpha); }
};

/// Grid aligned to `lattice`: p is an integer multiple of lattice.delta.
///   Sparse:   p ~ ratio (2/m ln T)^{-1/alpha}, ratio >= 10
///   Pickands: p = d (2/m ln T)^{-1/alpha}; d / (lattice step in scaled units) must be an integer
///   Dense:    p ~ ratio (2/m ln T)^{-1/alpha}, ratio <= 0.1
/// `param` is the ratio for Sparse/Dense and d for Pickands.
GridSpec make_aligned_grid(GridRegime regime, double param, double T, int m, double alpha,
                           const LatticeSpec& lattice);

/// Lattice stride k with p = k delta, or 0 when the grid is not lattice aligned.
std::size_t grid_stride(const GridSpec& grid, const LatticeSpec& lattice) noexcept;

struct MaximaSample {
  double m_cont = 0.0;  // lattice proxy for the continuous-time maximum
  double m_grid = 0.0;  // maximum over the sampling grid
  double T = 0.0;
  int m = 1;
  int n = 1;
  GridRegime regime = GridRegime::Sparse;
  std::uint64_t seed = 0;
};

/// Pointwise m-th largest (m = 1 is the maximum, m = n the minimum) of n paths
/// sharing one lattice.
std::vector<double> order_stat_path(std::span<const std::span<const double>> paths, int m);
std::vector<double> order_stat_path(std::span<const GaussianPath> paths, int m);

/// Continuous-approximation maximum (all lattice points) and grid maximum.
/// Grid points off the lattice use the nearest lattice value.
MaximaSample maxima_pair(std::span<const double> osp, const LatticeSpec& lattice, const GridSpec& grid);

/// CSV row "T,m,n,regime,m_cont,m_grid,seed"; the header is written by write_maxima_header.
void write_maxima_header(std::ostream& os);
void write_maxima_row(std::ostream& os, const MaximaSample& s);

}  // namespace osmax
