#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mmdelay/errors.hpp"
#include "mmdelay/quadrature.hpp"

using namespace mmdelay;

TEST_CASE("polynomials up to degree 20 integrate exactly on one panel") {
  const std::vector<double> breaks = {0.0, 1.0};
  for (int degree = 0; degree <= 20; ++degree) {
    const auto r = integrate_adaptive([&](double x) { return (degree + 1) * std::pow(x, degree); }, breaks, {});
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("oscillatory and peaked integrands converge to their closed forms") {
  const std::vector<double> breaks = {0.0, 2.0, 10.0, 40.0};
  const auto decay = integrate_adaptive([](double x) { return std::exp(-x); }, breaks, {});
  CHECK(decay.value == doctest::Approx(-std::expm1(-40.0)).epsilon(1e-12));

  const std::vector<double> period = {0.0, 20.0 * std::numbers::pi};
  const auto wave = integrate_adaptive([](double x) { return std::sin(x) * std::sin(x); }, period, {});
  CHECK(wave.value == doctest::Approx(10.0 * std::numbers::pi).epsilon(1e-11));

  const std::vector<double> unit = {0.0, 1.0};
  const auto root = integrate_adaptive([](double x) { return std::sqrt(x); }, unit, {});
  CHECK(root.value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("exhausting the subdivision budget reports the worst bracket") {
  QuadratureSpec tight;
  tight.max_subdivisions = 2;
  tight.abs_tol = 1e-15;
  tight.rel_tol = 1e-15;
  const std::vector<double> breaks = {0.0, 1.0};
  try {
    integrate_adaptive([](double x) { return 1.0 / std::sqrt(x + 1e-12); }, breaks, tight);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.last_width() > 0.0);
    CHECK(e.last_width() <= 1.0);
  }
}

TEST_CASE("non-finite integrands and bad specs are rejected") {
  const std::vector<double> breaks = {0.0, 1.0};
  CHECK_THROWS_AS(integrate_adaptive([](double) { return NAN; }, breaks, {}), EvaluationError);

  QuadratureSpec bad;
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.max_subdivisions = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  const std::vector<double> decreasing = {1.0, 0.0};
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return x; }, decreasing, {}), std::invalid_argument);
}
