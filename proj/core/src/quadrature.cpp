#include "osmax/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <map>
#include <memory>
#include <mutex>

#include "osmax/errors.hpp"

namespace osmax {

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw DomainError("Gauss-Legendre order must be >= 1");
  // Jacobi matrix of the monic Legendre recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double kk = static_cast<double>(k);
    jacobi(k, k - 1) = kk / std::sqrt(4.0 * kk * kk - 1.0);
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes_.resize(static_cast<std::size_t>(order));
  weights_.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    nodes_[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    weights_[static_cast<std::size_t>(i)] = 2.0 * v0 * v0;
  }
  // The rule is symmetric; enforce it exactly.
  for (int i = 0; i < order / 2; ++i) {
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    const double x = 0.5 * (nodes_[hi] - nodes_[lo]);
    const double w = 0.5 * (weights_[hi] + weights_[lo]);
    nodes_[lo] = -x;
    nodes_[hi] = x;
    weights_[lo] = weights_[hi] = w;
  }
  if (order % 2 == 1) nodes_[static_cast<std::size_t>(order / 2)] = 0.0;
}

const GaussLegendre& GaussLegendre::cached(int order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> rules;
  std::lock_guard lock(mutex);
  auto& slot = rules[order];
  if (!slot) slot = std::make_unique<GaussLegendre>(order);
  return *slot;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol, &error);
}

}  // namespace osmax
