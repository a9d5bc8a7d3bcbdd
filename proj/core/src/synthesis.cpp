#include "osmax/synthesis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>

#include "osmax/errors.hpp"
#include "osmax/random.hpp"

namespace osmax {

namespace {

constexpr double kClipRatio = 1e-6;

// The FFTW planner is not thread-safe; plan execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

/// In-place forward complex transform of a fixed size, one per thread and size.
class ComplexTransform {
 public:
  explicit ComplexTransform(std::size_t n) : n_(n) {
    buffer_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buffer_.get(), buffer_.get(), FFTW_FORWARD,
                             FFTW_ESTIMATE);
  }
  ~ComplexTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  ComplexTransform(const ComplexTransform&) = delete;
  ComplexTransform& operator=(const ComplexTransform&) = delete;

  fftw_complex* data() noexcept { return buffer_.get(); }
  void execute() noexcept { fftw_execute(plan_); }

 private:
  std::size_t n_;
  std::unique_ptr<fftw_complex, FftwFree> buffer_;
  fftw_plan plan_;
};

ComplexTransform& transform_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<ComplexTransform>> cache;
  auto& slot = cache[n];
  if (!slot) {
    // Large buffers are not worth keeping around once the size changes.
    for (auto it = cache.begin(); it != cache.end();) {
      if (it->first != n && it->first > (1u << 16)) it = cache.erase(it);
      else ++it;
    }
    slot = std::make_unique<ComplexTransform>(n);
  }
  return *slot;
}

struct Spectrum {
  std::vector<double> eigenvalues;
  double min_raw = 0.0;
  bool clipped = false;
};

/// Eigenvalues of the circulant with first row gamma(min(k, N - k)), k < N,
/// for `count` lattice points.
Spectrum embed(const std::function<double(std::size_t)>& gamma, std::size_t count) {
  const std::size_t n = embedding_size_for(count);
  auto& tf = transform_for(n);
  fftw_complex* buf = tf.data();
  for (std::size_t k = 0; k < n; ++k) {
    buf[k][0] = gamma(std::min(k, n - k));
    buf[k][1] = 0.0;
  }
  tf.execute();

  Spectrum s;
  s.eigenvalues.resize(n);
  double max_ev = 0.0;
  double min_ev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    s.eigenvalues[k] = buf[k][0];
    max_ev = std::max(max_ev, buf[k][0]);
    min_ev = std::min(min_ev, buf[k][0]);
  }
  s.min_raw = min_ev;
  if (min_ev < -kClipRatio * max_ev) {
    throw EmbeddingNotPSD("circulant embedding of size " + std::to_string(n) +
                          " has eigenvalue " + std::to_string(min_ev) + " (max " +
                          std::to_string(max_ev) + "); enlarge the embedding or coarsen the lattice");
  }
  for (double& ev : s.eigenvalues) {
    if (ev < 0.0) {
      ev = 0.0;
      s.clipped = true;
    }
  }
  return s;
}

/// Fills the transform buffer with sqrt(lambda / N) Z and transforms it. The
/// real and imaginary parts of the result are two independent stationary
/// sequences with the embedded covariance.
fftw_complex* circulant_draw(const std::vector<double>& eigenvalues, std::uint64_t seed) {
  const std::size_t n = eigenvalues.size();
  auto& tf = transform_for(n);
  fftw_complex* buf = tf.data();
  NormalStream normal(seed);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = std::sqrt(eigenvalues[k] * inv_n);
    buf[k][0] = scale * normal();
    buf[k][1] = scale * normal();
  }
  tf.execute();
  return buf;
}

double fgn_autocovariance(double hurst, std::size_t k) {
  const double h2 = 2.0 * hurst;
  const double kd = static_cast<double>(k);
  if (k == 0) return 1.0;
  return 0.5 * (std::pow(kd + 1.0, h2) - 2.0 * std::pow(kd, h2) + std::pow(kd - 1.0, h2));
}

}  // namespace

LatticeSpec LatticeSpec::make(double delta, std::size_t n_points) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("lattice step must be positive");
  if (n_points < 2) throw DomainError("lattice needs at least two points");
  return LatticeSpec{delta, n_points};
}

LatticeSpec LatticeSpec::covering(double horizon, double delta) {
  if (!(horizon > 0.0)) throw DomainError("lattice horizon must be positive");
  const double steps = std::ceil(horizon / delta * (1.0 - 1e-9));
  return make(delta, static_cast<std::size_t>(steps) + 1);
}

std::size_t embedding_size_for(std::size_t n_points) noexcept {
  const std::size_t need = n_points >= 2 ? 2 * (n_points - 1) : 1;
  std::size_t n = 1;
  while (n < need) n <<= 1;
  return n;
}

CirculantSpectrum circulant_spectrum(const std::function<double(std::size_t)>& autocovariance,
                                     const LatticeSpec& lattice) {
  auto s = embed(autocovariance, lattice.n_points);
  return CirculantSpectrum{std::move(s.eigenvalues), lattice, s.min_raw, s.clipped};
}

CirculantSpectrum circulant_spectrum(const CorrelationModel& model, const LatticeSpec& lattice) {
  const double delta = lattice.delta;
  return circulant_spectrum([&](std::size_t k) { return model(static_cast<double>(k) * delta); },
                            lattice);
}

std::pair<GaussianPath, GaussianPath> sample_path_pair(const CirculantSpectrum& spectrum,
                                                       std::uint64_t seed) {
  const std::size_t np = spectrum.lattice.n_points;
  const fftw_complex* y = circulant_draw(spectrum.eigenvalues, seed);
  GaussianPath a{std::vector<double>(np), spectrum.lattice, seed};
  GaussianPath b{std::vector<double>(np), spectrum.lattice, seed};
  for (std::size_t k = 0; k < np; ++k) {
    a.values[k] = y[k][0];
    b.values[k] = y[k][1];
  }
  return {std::move(a), std::move(b)};
}

GaussianPath sample_path(const CirculantSpectrum& spectrum, std::uint64_t seed) {
  return std::move(sample_path_pair(spectrum, seed).first);
}

FbmGenerator::FbmGenerator(double hurst, const LatticeSpec& lattice)
    : hurst_(hurst), lattice_(lattice) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fBm: hurst index must lie in (0, 1)");
  eigenvalues_ =
      embed([hurst](std::size_t k) { return fgn_autocovariance(hurst, k); }, lattice.n_points - 1)
          .eigenvalues;
}

void FbmGenerator::sample_pair_into(std::uint64_t seed, std::span<double> first,
                                    std::span<double> second) const {
  const std::size_t np = lattice_.n_points;
  if (first.size() != np || second.size() != np)
    throw DimensionMismatch("fBm: output spans must match the lattice");
  const fftw_complex* y = circulant_draw(eigenvalues_, seed);
  // Self-similarity: unit-step noise scaled by delta^H.
  const double scale = std::pow(lattice_.delta, hurst_);
  double sa = 0.0, sb = 0.0;
  first[0] = 0.0;
  second[0] = 0.0;
  for (std::size_t k = 1; k < np; ++k) {
    sa += scale * y[k - 1][0];
    sb += scale * y[k - 1][1];
    first[k] = sa;
    second[k] = sb;
  }
}

std::pair<GaussianPath, GaussianPath> FbmGenerator::sample_pair(std::uint64_t seed) const {
  GaussianPath a{std::vector<double>(lattice_.n_points), lattice_, seed};
  GaussianPath b{std::vector<double>(lattice_.n_points), lattice_, seed};
  sample_pair_into(seed, a.values, b.values);
  return {std::move(a), std::move(b)};
}

GaussianPath FbmGenerator::sample(std::uint64_t seed) const {
  return std::move(sample_pair(seed).first);
}

GaussianPath sample_fbm(double hurst, const LatticeSpec& lattice, std::uint64_t seed) {
  return FbmGenerator(hurst, lattice).sample(seed);
}

StationarySampler::StationarySampler(const CorrelationModel& model, const LatticeSpec& lattice)
    : lattice_(lattice), markov_(model.is_markov()) {
  if (markov_) rho_ = model(lattice.delta);
  else spectrum_ = circulant_spectrum(model, lattice);
}

void StationarySampler::sample_pair(std::uint64_t seed, std::span<double> first,
                                    std::span<double> second) const {
  const std::size_t np = lattice_.n_points;
  if (first.size() != np || second.size() != np)
    throw DimensionMismatch("sampler: output spans must match the lattice");
  if (!markov_) {
    const fftw_complex* y = circulant_draw(spectrum_.eigenvalues, seed);
    for (std::size_t k = 0; k < np; ++k) {
      first[k] = y[k][0];
      second[k] = y[k][1];
    }
    return;
  }
  NormalStream normal(seed);
  const double innovation = std::sqrt(1.0 - rho_ * rho_);
  for (auto out : {first, second}) {
    double x = normal();
    out[0] = x;
    for (std::size_t k = 1; k < np; ++k) {
      x = rho_ * x + innovation * normal();
      out[k] = x;
    }
  }
}

void write_path_csv(std::ostream& os, const GaussianPath& path) {
  const auto old_precision = os.precision(17);
  os << "index,t,value\n";
  for (std::size_t k = 0; k < path.values.size(); ++k)
    os << k << ',' << path.lattice.time(k) << ',' << path.values[k] << '\n';
  os.precision(old_precision);
}

}  // namespace osmax
