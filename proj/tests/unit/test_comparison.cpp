#include <doctest.h>

#include <cmath>

#include "osmax/comparison.hpp"
#include "osmax/errors.hpp"

using namespace osmax;

namespace {

Eigen::MatrixXd corr2(double rho) {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, rho, rho, 1.0;
  return s;
}

ComparisonInstance pair_instance(double s0, double s1, double u, int n = 1, int m = 1) {
  ComparisonInstance inst;
  inst.d = 2;
  inst.n = n;
  inst.m = m;
  inst.sigma0 = corr2(s0);
  inst.sigma1 = corr2(s1);
  inst.u = Eigen::Vector2d(u, u);
  return inst;
}

// Composite Simpson rule with ten panels, the independent oracle.
template <typename F>
double simpson10(F f) {
  const int panels = 10;
  const double h = 1.0 / panels;
  double acc = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("bound vanishes for equal matrices") {
  CHECK(comparison_bound(pair_instance(0.3, 0.3, 2.5)) == 0.0);
}

TEST_CASE("bound matches an independent quadrature") {
  const auto inst = pair_instance(0.0, 0.5, 3.0);
  const double ref = 0.5 * simpson10([](double h) {
    const double delta = 0.5 * (1.0 - h);
    return std::pow(1.0 - delta, -0.5) * std::exp(-18.0 / (2.0 * (1.0 + delta)));
  });
  CHECK(std::abs(comparison_bound(inst) - ref) < 1e-6);
}

TEST_CASE("bound decreases when thresholds grow and is linear near equality") {
  auto inst = pair_instance(0.1, 0.4, 2.0, 3, 2);
  const double b = comparison_bound(inst);
  inst.u *= 2.0;
  CHECK(comparison_bound(inst) < b);

  const double small = comparison_bound(pair_instance(0.3, 0.3 + 1e-4, 2.5));
  const double twice = comparison_bound(pair_instance(0.3, 0.3 + 2e-4, 2.5));
  CHECK(twice / small == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(small < 1e-4);
}

TEST_CASE("near-singular pairs are reported") {
  CHECK_THROWS_AS(comparison_bound(pair_instance(0.2, 1.0 - 1e-13, 2.0)), SingularPair);
}

TEST_CASE("instance validation and JSON") {
  auto inst = pair_instance(0.1, 0.2, 2.0);
  inst.sigma1(0, 1) = 0.7;
  CHECK_THROWS_AS(inst.validate(), DomainError);
  inst = pair_instance(0.1, 0.2, 2.0, 2, 3);
  CHECK_THROWS_AS(inst.validate(), DomainError);

  const auto ok = pair_instance(0.1, 0.2, 2.0, 2, 1);
  const auto back = ComparisonInstance::from_json(ok.to_json());
  CHECK(back.sigma1.isApprox(ok.sigma1));
  CHECK(back.u.isApprox(ok.u));
  CHECK(back.n == 2);
  CHECK_THROWS_AS(ComparisonInstance::from_json("{\"d\": 2}"), ConfigError);
}

TEST_CASE("Monte Carlo oracle: exact probabilities") {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  const auto a = mc_order_stat_cdf(one, 1, 1, Eigen::VectorXd::Zero(1), 100000, 1);
  CHECK(std::abs(a.p - 0.5) <= 3.0 * a.se);

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const auto b = mc_order_stat_cdf(id, 1, 1, Eigen::VectorXd::Zero(2), 100000, 2);
  CHECK(std::abs(b.p - 0.25) <= 3.0 * b.se);

  const auto c = mc_order_stat_cdf(id, 2, 2, Eigen::VectorXd::Zero(2), 100000, 3);
  CHECK(std::abs(c.p - 0.5625) <= 3.0 * c.se);

  CHECK(mc_order_stat_cdf(id, 2, 2, Eigen::VectorXd::Zero(2), 20000, 9).p ==
        mc_order_stat_cdf(id, 2, 2, Eigen::VectorXd::Zero(2), 20000, 9).p);
}

TEST_CASE("Monte Carlo oracle: factorisation and errors") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(correlation_factor(bad), CholeskyFailure);
  CHECK_THROWS_AS(mc_order_stat_cdf(bad, 1, 1, Eigen::VectorXd::Zero(2), 10000, 1), CholeskyFailure);
  CHECK_THROWS_AS(mc_order_stat_cdf(corr2(0.1), 1, 1, Eigen::VectorXd::Zero(2), 100, 1), DomainError);

  const Eigen::MatrixXd singular = corr2(1.0);
  const auto L = correlation_factor(singular);
  CHECK((L * L.transpose()).isApprox(singular, 1e-12));
}
