#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace osmax {

/// Gauss-Legendre rule on [-1, 1] from the Golub-Welsch eigenproblem.
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  int order() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  template <typename F>
  double integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(mid + half * nodes_[i]);
    return half * acc;
  }

  /// Cached rule of the given order (thread-safe).
  static const GaussLegendre& cached(int order);

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// E f(N) for a standard normal N, by `order`-point Gauss-Legendre panels of
/// width at most `width` laid out from `center` over [-13, 13]. Centering the
/// panels on a sharp feature of f (and matching its width) keeps the rule
/// exponentially accurate where a single global rule would not be.
template <typename F>
double normal_expectation(F&& f, int order, double center = 0.0, double width = 0.5) {
  constexpr double kReach = 13.0;
  const auto& rule = GaussLegendre::cached(order);
  const double w = std::clamp(width, 1e-3, 0.5);
  const double c = std::clamp(center, -kReach, kReach);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [&](double z) { return f(z) * std::exp(-0.5 * z * z) * inv_sqrt_2pi; };
  double acc = 0.0;
  for (double lo = c; lo < kReach; lo += w) acc += rule.integrate(integrand, lo, std::min(lo + w, kReach));
  for (double hi = c; hi > -kReach; hi -= w) acc += rule.integrate(integrand, std::max(hi - w, -kReach), hi);
  return acc;
}

/// Adaptive Gauss-Kronrod integral of f over [a, b] to the given relative tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10);

}  // namespace osmax
