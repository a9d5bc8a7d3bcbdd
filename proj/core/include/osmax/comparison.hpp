#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace osmax {

/// Two d x d correlation structures shared by n independent columns, and the
/// thresholds u for the m-th largest entry of each row.
struct ComparisonInstance {
  int d = 2;
  int n = 1;
  int m = 1;
  Eigen::MatrixXd sigma0;
  Eigen::MatrixXd sigma1;
  Eigen::VectorXd u;

  /// Throws DomainError/DimensionMismatch when shapes, diagonals, symmetry or
  /// positive semidefiniteness fail.
  void validate() const;

  static ComparisonInstance from_json(const std::string& text);
  std::string to_json() const;
};

/// Normal comparison bound (constant taken as 1) on
/// |P(X_(m) <= u) - P(Y_(m) <= u)| where m counts from the top. Throws
/// SingularPair when an interpolated correlation reaches 1.
double comparison_bound(const ComparisonInstance& inst);

struct MonteCarloProbability {
  double p = 0.0;
  double se = 0.0;
  long long replicates = 0;
};

/// P(all rows have m-th largest <= u) by direct simulation of the d x n array.
/// Throws CholeskyFailure for a matrix that is not positive semidefinite.
MonteCarloProbability mc_order_stat_cdf(const Eigen::MatrixXd& sigma, int n, int m, const Eigen::VectorXd& u,
                                        long long replicates, std::uint64_t seed);

/// Square-root factor L with L L^T = sigma (Cholesky, with a symmetric
/// eigen-root fallback for singular but semidefinite input).
Eigen::MatrixXd correlation_factor(const Eigen::MatrixXd& sigma);

}  // namespace osmax
