#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osmax/orthant_measure.hpp"
#include "osmax/synthesis.hpp"

namespace osmax {

enum class PickandsKind { Continuous, Grid, Joint };

std::string_view to_string(PickandsKind kind);
PickandsKind parse_pickands_kind(std::string_view name);

/// eta_i(t_k) = sqrt(2) B_i(t_k) - t_k^alpha for m independent fractional
/// Brownian motions with Hurst index alpha / 2, on t_k = k step, k < count.
struct EtaPaths {
  int m = 1;
  double step = 1.0;
  std::size_t count = 1;
  std::vector<double> values;  // path-major: values[i * count + k]

  double at(int i, std::size_t k) const noexcept {
    return values[static_cast<std::size_t>(i) * count + k];
  }
  /// All-zero paths at the single time t = 0 (the lambda -> 0 limit).
  static EtaPaths origin(int m);
};

/// Draws EtaPaths on [0, lambda] with a fixed step. alpha = 2 uses the
/// degenerate fBm B(t) = t Z, for which no circulant spectrum is needed.
class EtaSimulator {
 public:
  EtaSimulator(int m, double alpha, double lambda, double step);

  /// Paths of replicate `replicate` under `seed`. Paths are drawn in pairs from
  /// one complex transform; path g = replicate * m + i comes from pair g / 2.
  EtaPaths simulate(std::uint64_t seed, std::size_t replicate) const;

  std::size_t count() const noexcept { return count_; }
  double step() const noexcept { return step_; }

 private:
  int m_;
  double alpha_;
  double step_;
  std::size_t count_;
  std::optional<FbmGenerator> fbm_;
};

/// Per-path measures. Points are restricted to t <= horizon (defaults to the
/// full path) and to lattice indices that are multiples of `stride`.
double continuous_measure(const EtaPaths& eta, double horizon = -1.0, std::size_t stride = 1);
double grid_measure(const EtaPaths& eta, double d, double horizon = -1.0);
double joint_measure(const EtaPaths& eta, double d, double x, double y, double horizon = -1.0,
                     std::size_t stride = 1);

struct PickandsRequest {
  PickandsKind kind = PickandsKind::Continuous;
  int m = 1;
  double alpha = 1.0;
  double lambda = 1.0;
  /// Lattice step for the fBm paths; <= 0 selects automatic step control.
  double time_step = 0.0;
  double d = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::size_t replicates = 20000;
  std::uint64_t seed = 1;
};

struct PickandsEstimate {
  PickandsKind kind = PickandsKind::Continuous;
  int m = 1;
  double alpha = 1.0;
  double lambda = 0.0;
  double d = 0.0;
  double x = 0.0;
  double y = 0.0;
  double value_of_lambda = 0.0;  // estimate of H(lambda)
  double slope = 0.0;            // estimate of lim H(lambda) / lambda
  double ci_halfwidth = 0.0;     // 95% normal-theory half width for value_of_lambda
  std::size_t replicates = 0;
  double time_step = 0.0;
  std::string caveat;
};

/// Monte Carlo estimate of H(lambda) for one kind. slope is value / lambda.
PickandsEstimate estimate_H(const PickandsRequest& request);

/// Estimates at lambda_max / 4, lambda_max / 2 and lambda_max from the same
/// paths (common random numbers); each estimate's slope is the extrapolated one.
std::vector<PickandsEstimate> estimate_schedule(const PickandsRequest& request);

/// Least-squares slope of H(lambda) against lambda over the larger half of
/// the lambda values. Needs at least three distinct lambdas.
double slope_extrapolate(std::span<const PickandsEstimate> estimates);
double slope_extrapolate(std::span<const double> lambdas, std::span<const double> values);

/// Joint constants H^{z,0}_{d,m,alpha} for a range of z, all from one set of
/// paths. Used to build shift-identity tables for the Pickands-grid limit law.
struct JointTableRow {
  double z;
  double value;
};
std::vector<JointTableRow> estimate_joint_table(int m, double alpha, double d,
                                                std::span<const double> zs, double lambda_max,
                                                double time_step, std::size_t replicates,
                                                std::uint64_t seed);

void write_estimate_header(std::ostream& os);
void write_estimate_row(std::ostream& os, const PickandsEstimate& e);

}  // namespace osmax
