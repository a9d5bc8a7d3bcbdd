#include <doctest.h>

#include <cmath>
#include <numbers>

#include "osmax/correlation.hpp"
#include "osmax/errors.hpp"

using namespace osmax;

namespace {

std::vector<CorrelationModel> all_models() {
  return {CorrelationModel::exp_alpha(1.0),    CorrelationModel::exp_alpha(0.5),
          CorrelationModel::exp_alpha(1.5),    CorrelationModel::exp_alpha(2.0),
          CorrelationModel::polya_log(1.0),    CorrelationModel::polya_log(0.3, 0.7),
          CorrelationModel::polya_log_infty(0.5), CorrelationModel::polya_log_infty(0.5, 0.8)};
}

}  // namespace

TEST_CASE("evaluate: fixed values") {
  CHECK(CorrelationModel::exp_alpha(1.0)(0.0) == 1.0);
  CHECK(CorrelationModel::exp_alpha(1.0)(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(CorrelationModel::polya_log(1.0)(0.0) == 1.0);
  CHECK(CorrelationModel::polya_log_infty(0.5)(0.0) == 1.0);
}

TEST_CASE("evaluate: even, bounded, below one away from the origin") {
  for (const auto& model : all_models()) {
    for (double t : {1e-6, 1e-3, 0.1, 1.0, 7.5, 1e3, 1e8}) {
      CHECK(model(t) == model(-t));
      CHECK(model(t) < 1.0);
      CHECK(std::abs(model(t)) <= 1.0);
    }
  }
}

TEST_CASE("local behaviour 1 - r(t) ~ t^alpha") {
  for (const auto& model : all_models()) {
    for (double t : {1e-2, 1e-3, 1e-4}) {
      const double ta = std::pow(t, model.alpha());
      CHECK(std::abs(1.0 - model(t) - ta) <= 0.1 * ta);
    }
  }
}

TEST_CASE("Polya families are convex and decreasing") {
  for (const auto& model : {CorrelationModel::polya_log(1.0), CorrelationModel::polya_log(2.0, 0.5),
                            CorrelationModel::polya_log_infty(0.5), CorrelationModel::polya_log_infty(0.9, 1.0)}) {
    for (double h : {1e-3, 0.1, 10.0}) {
      for (int k = 1; k < 500; ++k) {
        const double second = model((k + 1) * h) - 2.0 * model(k * h) + model((k - 1) * h);
        CHECK(second >= -1e-9);
        CHECK(model((k + 1) * h) <= model(k * h));
      }
    }
  }
}

TEST_CASE("long-range limits and probes") {
  CHECK(long_range_limit(CorrelationModel::exp_alpha(1.0)) == 0.0);
  CHECK(long_range_limit(CorrelationModel::polya_log(1.0)) == 1.0);
  CHECK(std::isinf(long_range_limit(CorrelationModel::polya_log_infty(0.5))));

  // The approach to r is logarithmically slow: check monotone approach from
  // below and the value at 1e9 rather than a 5% window at 1e6.
  const auto probe = long_range_probe(CorrelationModel::polya_log(1.0));
  CHECK(probe[0] < probe[1]);
  CHECK(probe[1] < probe[2]);
  CHECK(probe[2] < 1.0);
  CHECK(std::abs(probe[2] - 1.0) < 0.05);

  const auto inf = long_range_probe(CorrelationModel::polya_log_infty(0.5));
  CHECK(inf[2] > inf[1]);
  CHECK(inf[1] > inf[0]);

  const auto ou = long_range_probe(CorrelationModel::exp_alpha(1.0));
  CHECK(ou[0] == doctest::Approx(0.0));
}

TEST_CASE("validation against the theorems") {
  CHECK(validate_for_theorem(CorrelationModel::exp_alpha(1.0), Theorem::T21).passed());
  CHECK(validate_for_theorem(CorrelationModel::polya_log(1.0), Theorem::T23).passed());
  CHECK(validate_for_theorem(CorrelationModel::polya_log_infty(0.5), Theorem::T24).passed());

  const auto bad = validate_for_theorem(CorrelationModel::exp_alpha(1.0), Theorem::T24);
  REQUIRE_FALSE(bad.passed());
  CHECK(bad.violations.front().find("not inf") != std::string::npos);
  CHECK_THROWS_AS(bad.require(), ValidationFailure);

  CHECK_FALSE(validate_for_theorem(CorrelationModel::polya_log_infty(0.5), Theorem::T21).passed());
}

TEST_CASE("constructor domains") {
  CHECK_THROWS_AS(CorrelationModel::exp_alpha(0.0), ValidationFailure);
  CHECK_THROWS_AS(CorrelationModel::exp_alpha(2.5), ValidationFailure);
  CHECK_THROWS_AS(CorrelationModel::polya_log(-1.0), ValidationFailure);
  CHECK_THROWS_AS(CorrelationModel::polya_log(1.0, 1.5), ValidationFailure);
  CHECK_THROWS_AS(CorrelationModel::polya_log_infty(1.0), ValidationFailure);
}

TEST_CASE("key=value round trip") {
  for (const auto& model : all_models()) CHECK(CorrelationModel::from_key_values(model.to_key_values()) == model);
  CHECK(parse_theorem(to_string(Theorem::T22)) == Theorem::T22);
  CHECK(parse_family("polya_log_infty") == CorrelationFamily::PolyaLogInfty);
}
