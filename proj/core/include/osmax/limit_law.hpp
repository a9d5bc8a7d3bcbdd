#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "osmax/correlation.hpp"
#include "osmax/order_stats.hpp"

namespace osmax {

/// n! / (m! (n - m)!) in floating point.
double binomial(int n, int m);

/// Standard normal tail Psi(u) = P(N > u) and distribution function Phi.
double normal_tail(double u) noexcept;
double normal_cdf(double x) noexcept;

struct NormalizingConstants {
  int m = 1;
  int n = 1;
  double alpha = 1.0;
  double T = 0.0;
  double p = 0.0;
  double H_cont = 0.0;
  std::optional<double> H_grid;

  double a = 0.0;       // sqrt(2 m ln T)
  double b_cont = 0.0;  // continuous-time maximum
  double b_sparse = 0.0;
  std::optional<double> b_pick;  // Pickands grid, needs H_grid

  /// Grid centering for a regime: b_sparse, b_pick or b_cont.
  double b_star(GridRegime regime) const;
};

/// Normalizing constants for the maxima of the m-th order statistic process
/// of n copies, sampled on a grid with step p. Throws DomainError for T <= e.
NormalizingConstants norming_constants(int m, int n, double alpha, double T, double p, double H_cont,
                                       std::optional<double> H_grid = std::nullopt);

/// H^{z,0}_{d,m,alpha} on a grid of z values; the shift identity
/// H^{x,y} = e^{-m y} H^{x-y,0} turns it into the full two-argument constant.
class JointConstantTable {
 public:
  JointConstantTable(int m, std::vector<double> z, std::vector<double> value);

  static JointConstantTable read_csv(std::istream& is, int m);
  void write_csv(std::ostream& os) const;

  /// H^{x,y} by linear interpolation in x - y. Throws DomainError outside the table.
  double operator()(double x, double y) const;

  int m() const noexcept { return m_; }
  const std::vector<double>& z() const noexcept { return z_; }
  const std::vector<double>& values() const noexcept { return value_; }

 private:
  int m_;
  std::vector<double> z_;
  std::vector<double> value_;
};

/// (x, y) -> H^{ln H_cont + x, ln H_grid + y}_{d,m,alpha}, the quantity entering
/// the Pickands-grid law.
std::function<double(double, double)> pickands_grid_joint_term(const JointConstantTable& table,
                                                               double H_cont, double H_grid);

struct LimitLawSpec {
  Theorem theorem = Theorem::T21;
  int m = 1;
  int n = 1;
  /// Long-range limit r; ignored for T24.
  double r_long = 0.0;
  /// T22 only: (x, y) -> H^{ln H_cont + x, ln H_grid + y}.
  std::function<double(double, double)> joint_term;
  /// Gauss-Legendre nodes per panel of the mixer quadrature (>= 16).
  int quadrature_order = 64;
};

/// Limiting joint distribution function of the normalized (continuous, grid)
/// maxima. Expectations over the normal mixer use Gauss-Legendre panels
/// centred where the inner exponent crosses one; r = 0 is evaluated in closed form.
double limit_cdf(const LimitLawSpec& spec, double x, double y);

/// E exp(-exp(-x - r + sqrt(2 r m) N)), the single-maximum law.
double marginal_cdf(double r, int m, double x, int quadrature_order = 64);

struct TailApproximation {
  double value = 0.0;
  /// False when the leading term is >= 0.5, i.e. far from the asymptotic regime.
  bool asymptotic = true;
};

/// Leading term C(n, m) S H u^{2/alpha} Psi(u)^m of P(sup_{[0,S]} X_{m:n} > u).
TailApproximation tail_probability(double u, double S, int m, int n, double alpha, double H_cont);

}  // namespace osmax
