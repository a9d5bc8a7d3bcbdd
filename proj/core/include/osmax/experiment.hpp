#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osmax/config.hpp"
#include "osmax/order_stats.hpp"

namespace osmax {

struct ProbeResult {
  double x = 0.0;
  double y = 0.0;
  double empirical = 0.0;
  double theoretical = 0.0;
  double abs_err = 0.0;
};

struct EmpiricalJointCDF {
  double T = 0.0;
  std::size_t replicates = 0;
  std::vector<ProbeResult> probes;
  /// max |empirical - theoretical| over the probes; NaN without a theory.
  double ks_joint = 0.0;
};

/// Fraction of samples with both coordinates <= (x, y) at every probe. With a
/// theory callback the theoretical column and ks_joint are filled in as well.
/// Throws EmptySamples.
EmpiricalJointCDF empirical_joint_cdf(std::span<const std::pair<double, double>> samples,
                                      std::span<const std::pair<double, double>> probes,
                                      const std::function<double(double, double)>& theory = {});

/// max_i |empirical_i - theoretical_i|. Throws LengthMismatch.
double ks_statistic(std::span<const double> empirical, std::span<const double> theoretical);

/// Spearman rank correlation with average ranks for ties; NaN for fewer than two points.
double spearman(std::span<const double> a, std::span<const double> b);

struct BiasProbe {
  double epsilon = 0.0;       // the finer lattice ratio, epsilon_cont / 2
  double ks_joint = 0.0;      // joint statistic with the finer continuous maximum
  double ks_marginal = 0.0;
  double mean_shift = 0.0;    // mean of a (M_fine - M), >= 0
};

struct HorizonResult {
  EmpiricalJointCDF cdf;
  double delta = 0.0;             // continuous-approximation lattice step
  std::size_t lattice_points = 0;
  double p = 0.0;                 // grid step
  std::size_t grid_stride = 0;
  double scaled_step = 0.0;       // p (2/m ln T)^{1/alpha}
  double a = 0.0;
  double b_cont = 0.0;
  double b_grid = 0.0;
  double r_T = 0.0;               // r(T), used by the strong-dependence normalization
  double ks_marginal = 0.0;       // continuous maximum against its limiting marginal
  double independence = 0.0;      // max |F(x,y) - F(x,inf) F(inf,y)| over probes
  double dense_excess = 0.0;      // fraction with a (M - M^p) > 0.25
  std::size_t grid_violations = 0;  // samples with M^p > M; must be zero
  bool embedding_clipped = false;
  std::optional<BiasProbe> bias;
  std::vector<MaximaSample> maxima;
};

struct ExperimentReport {
  ExperimentConfig config;
  double H_cont = 0.0;
  std::optional<double> H_grid;
  std::string constants_provenance;
  std::vector<HorizonResult> horizons;
  double spearman_joint = 0.0;
  double spearman_marginal = 0.0;
  /// "converging", "not converging" or "single horizon".
  std::string verdict;

  bool converging() const noexcept { return verdict != "not converging"; }
};

using ProgressSink = std::function<void(const std::string&)>;

/// Replicated simulation of (M, M^p) along the T schedule, normalization per
/// theorem and comparison with the limit law. Throws ValidationFailure when
/// the model does not satisfy the theorem's hypotheses and RegimeMismatch when
/// the grid regime does not match the theorem.
ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressSink& progress = {});

/// Writes cdf.csv, maxima.csv (when enabled), summary.json and the
/// timestamp sidecar run_info.json. Everything except the sidecar is a pure
/// function of the configuration.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// Exit status for a finished run: 0 converging, 3 trend failure.
int report_exit_code(const ExperimentReport& report) noexcept;

}  // namespace osmax
