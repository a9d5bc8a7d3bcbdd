#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace osmax {

enum class CorrelationFamily { ExpAlpha, PolyaLog, PolyaLogInfty };

/// Which limit theorem a configuration targets.
///   T21 sparse grid, T22 Pickands grid, T23 dense grid (all with r < inf),
///   T24 strong dependence (r = inf), any grid.
enum class Theorem { T21, T22, T23, T24 };

std::string_view to_string(CorrelationFamily family);
std::string_view to_string(Theorem theorem);
CorrelationFamily parse_family(std::string_view name);
Theorem parse_theorem(std::string_view name);

/// Stationary correlation r(t) with 1 - r(t) ~ |t|^alpha at the origin and
/// r(t) ln t -> r_long at infinity.
///
///   ExpAlpha        r(t) = exp(-|t|^alpha)                       r_long = 0
///   PolyaLog        r(t) = r / ln(e^r + r e^r |t|^alpha)         r_long = r
///   PolyaLogInfty   r(t) = (ln(e + (e/beta) |t|^alpha))^-beta    r_long = inf
///
/// The two logarithmic families are convex and decreasing for alpha <= 1,
/// hence positive definite by Polya's criterion. The inner scale constants are
/// fixed by the requirement that the local coefficient at the origin is one.
class CorrelationModel {
 public:
  static CorrelationModel exp_alpha(double alpha);
  static CorrelationModel polya_log(double r, double alpha = 1.0);
  static CorrelationModel polya_log_infty(double beta, double alpha = 1.0);

  /// Correlation at lag t. Even in t, equal to one exactly at t = 0.
  double operator()(double t) const noexcept;

  CorrelationFamily family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  /// The family parameter: r for PolyaLog, beta for PolyaLogInfty, unused (0) for ExpAlpha.
  double param() const noexcept { return param_; }

  /// Exp(-|t|) is the Ornstein-Uhlenbeck correlation, which admits an exact
  /// first-order autoregressive sampler on uniform lattices.
  bool is_markov() const noexcept {
    return family_ == CorrelationFamily::ExpAlpha && alpha_ == 1.0;
  }

  /// Plain-text key=value rendering (family, alpha and the family parameter).
  std::map<std::string, std::string> to_key_values() const;
  static CorrelationModel from_key_values(const std::map<std::string, std::string>& kv);

  friend bool operator==(const CorrelationModel&, const CorrelationModel&) = default;

 private:
  CorrelationModel(CorrelationFamily family, double alpha, double param)
      : family_(family), alpha_(alpha), param_(param) {}

  CorrelationFamily family_;
  double alpha_;
  double param_;
};

inline double evaluate(const CorrelationModel& model, double t) noexcept { return model(t); }

/// Analytic limit of r(t) ln t as t -> infinity; +infinity for PolyaLogInfty.
double long_range_limit(const CorrelationModel& model) noexcept;

/// r(t) ln t evaluated at t = 1e3, 1e6, 1e9.
std::array<double, 3> long_range_probe(const CorrelationModel& model) noexcept;

struct ValidationReport {
  Theorem theorem;
  std::vector<std::string> violations;

  bool passed() const noexcept { return violations.empty(); }
  /// Throws ValidationFailure listing every violated condition.
  void require() const;
};

/// Numeric check of the hypotheses each theorem places on r(t).
ValidationReport validate_for_theorem(const CorrelationModel& model, Theorem theorem);

}  // namespace osmax
