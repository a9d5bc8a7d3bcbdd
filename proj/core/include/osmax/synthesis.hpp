#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "osmax/correlation.hpp"

namespace osmax {

/// Uniform lattice {0, delta, ..., (n_points - 1) delta}.
struct LatticeSpec {
  double delta = 1.0;
  std::size_t n_points = 2;

  /// Validating constructor: delta > 0, n_points >= 2.
  static LatticeSpec make(double delta, std::size_t n_points);
  /// Smallest lattice with step delta whose horizon reaches `horizon` (up to 1e-9 relative slack).
  static LatticeSpec covering(double horizon, double delta);

  double horizon() const noexcept { return delta * static_cast<double>(n_points - 1); }
  double time(std::size_t k) const noexcept { return delta * static_cast<double>(k); }
};

struct GaussianPath {
  std::vector<double> values;
  LatticeSpec lattice;
  std::uint64_t seed = 0;
};

/// Eigenvalues of the minimal power-of-two circulant embedding of a stationary
/// covariance on a lattice.
struct CirculantSpectrum {
  std::vector<double> eigenvalues;
  LatticeSpec lattice;
  /// Most negative eigenvalue before clipping.
  double min_raw_eigenvalue = 0.0;
  /// Set when eigenvalues in (-1e-6 max, 0) were clipped to zero.
  bool clipped = false;

  std::size_t embedding_size() const noexcept { return eigenvalues.size(); }
};

/// Smallest power of two that is >= max(2 (n - 1), 1).
std::size_t embedding_size_for(std::size_t n_points) noexcept;

/// Spectrum for the model's correlation sampled on the lattice. The embedding
/// row is c_k = r(min(k, N - k) delta). Throws EmbeddingNotPSD when an
/// eigenvalue falls below -1e-6 times the largest one.
CirculantSpectrum circulant_spectrum(const CorrelationModel& model, const LatticeSpec& lattice);

/// Same, from an arbitrary autocovariance sequence gamma(k) in lattice steps.
CirculantSpectrum circulant_spectrum(const std::function<double(std::size_t)>& autocovariance,
                                     const LatticeSpec& lattice);

/// One stationary path. Equal to the first member of sample_path_pair.
GaussianPath sample_path(const CirculantSpectrum& spectrum, std::uint64_t seed);

/// Two independent paths from a single complex transform (real and imaginary parts).
std::pair<GaussianPath, GaussianPath> sample_path_pair(const CirculantSpectrum& spectrum,
                                                       std::uint64_t seed);

/// Exact fractional Brownian motion B_H on a lattice: circulant embedding of
/// fractional Gaussian noise, cumulatively summed. The spectrum is built once.
class FbmGenerator {
 public:
  FbmGenerator(double hurst, const LatticeSpec& lattice);

  GaussianPath sample(std::uint64_t seed) const;
  std::pair<GaussianPath, GaussianPath> sample_pair(std::uint64_t seed) const;
  /// Allocation-free variant; both spans must have lattice().n_points entries.
  void sample_pair_into(std::uint64_t seed, std::span<double> first, std::span<double> second) const;

  double hurst() const noexcept { return hurst_; }
  const LatticeSpec& lattice() const noexcept { return lattice_; }

 private:
  double hurst_;
  LatticeSpec lattice_;
  std::vector<double> eigenvalues_;
};

GaussianPath sample_fbm(double hurst, const LatticeSpec& lattice, std::uint64_t seed);

/// Stationary sampler used by the experiment harness. Ornstein-Uhlenbeck
/// models use the exact autoregressive recursion; all others go through the
/// circulant spectrum.
class StationarySampler {
 public:
  StationarySampler(const CorrelationModel& model, const LatticeSpec& lattice);

  void sample_pair(std::uint64_t seed, std::span<double> first, std::span<double> second) const;

  bool uses_circulant() const noexcept { return !markov_; }
  const LatticeSpec& lattice() const noexcept { return lattice_; }
  /// Only meaningful when uses_circulant().
  const CirculantSpectrum& spectrum() const noexcept { return spectrum_; }

 private:
  LatticeSpec lattice_;
  bool markov_;
  double rho_ = 0.0;
  CirculantSpectrum spectrum_;
};

/// CSV with header "index,t,value".
void write_path_csv(std::ostream& os, const GaussianPath& path);

}  // namespace osmax
