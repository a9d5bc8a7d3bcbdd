#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "osmax/orthant_measure.hpp"

using namespace osmax;

namespace {

// Inclusion-exclusion over all nonempty subsets in long double: the
// intersection of lower orthants is the orthant at the coordinatewise minimum,
// whose exp(sum w) measure is exp(sum of its coordinates).
long double brute_union(const OrthantPointSet& s) {
  const std::size_t k = s.size();
  long double total = 0.0L;
  for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
    long double exponent = 0.0L;
    for (int i = 0; i < s.dim(); ++i) {
      double lo = 1e300;
      for (std::size_t j = 0; j < k; ++j)
        if (mask >> j & 1U) lo = std::min(lo, s.coord(j, i));
      exponent += lo;
    }
    total += (__builtin_popcountll(mask) % 2 == 1 ? 1.0L : -1.0L) * std::exp(exponent);
  }
  return total;
}

OrthantPointSet random_set(std::mt19937_64& rng, int dim, std::size_t count) {
  std::uniform_real_distribution<double> u(-2.0, 1.0);
  OrthantPointSet s(dim);
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k < count; ++k) {
    for (double& v : p) v = u(rng);
    s.add(p);
  }
  return s;
}

}  // namespace

TEST_CASE("union measure: hand examples") {
  OrthantPointSet one(1);
  one.add(std::vector<double>{0.0});
  CHECK(orthant_union_exp_measure(one) == doctest::Approx(1.0).epsilon(1e-15));

  OrthantPointSet two(2, {1.0, 0.0, 0.0, 1.0});
  CHECK(orthant_union_exp_measure(two) == doctest::Approx(2.0 * std::exp(1.0) - 1.0).epsilon(1e-14));

  CHECK(orthant_union_exp_measure(OrthantPointSet(3)) == 0.0);
}

TEST_CASE("union measure equals inclusion-exclusion") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + trial % 3;
    const std::size_t count = 1 + static_cast<std::size_t>(trial % 12);
    const auto s = random_set(rng, dim, count);
    const long double ref = brute_union(s);
    CHECK(std::abs(orthant_union_exp_measure(s) - static_cast<double>(ref)) <= 1e-12 * static_cast<double>(ref));
  }
}

TEST_CASE("union measure: ties and duplicates") {
  OrthantPointSet s(3, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, -1.0, 0.0, 0.5, -1.0, 0.0});
  const long double ref = brute_union(s);
  CHECK(orthant_union_exp_measure(s) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
}

TEST_CASE("intersection of unions equals pairwise inclusion-exclusion") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 3;
    const auto a = random_set(rng, dim, 1 + static_cast<std::size_t>(trial % 4));
    const auto b = random_set(rng, dim, 1 + static_cast<std::size_t>((trial / 4) % 4));
    // (U a) n (U b) is the union over pairs of the coordinatewise minima.
    OrthantPointSet pairs(dim);
    std::vector<double> p(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        for (int c = 0; c < dim; ++c) p[static_cast<std::size_t>(c)] = std::min(a.coord(i, c), b.coord(j, c));
        pairs.add(p);
      }
    const long double ref = brute_union(pairs);
    const double got = orthant_intersection_exp_measure(a, b);
    CHECK(std::abs(got - static_cast<double>(ref)) <= 1e-12 * static_cast<double>(ref));
    CHECK(got <= orthant_union_exp_measure(a) * (1 + 1e-12));
    CHECK(got <= orthant_union_exp_measure(b) * (1 + 1e-12));
  }
}
