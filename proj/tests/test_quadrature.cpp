#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "lelong/errors.hpp"
#include "lelong/quadrature.hpp"

using namespace lelong;

TEST_CASE("integrate: smooth integrands") {
  const auto a = integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(a.converged);
  CHECK(a.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto b = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(b.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(b.abs_error <= 1e-10);
  CHECK(integrate([](double) { return 1.0; }, 0.3, 0.3).value == 0.0);
}

TEST_CASE("integrate_from_zero: integrable endpoint singularities") {
  const auto a = integrate_from_zero([](double x) { return 1.0 / std::sqrt(x); }, 1.0);
  CHECK(a.converged);
  CHECK(a.value == doctest::Approx(2.0).epsilon(1e-11));
  const auto b = integrate_from_zero([](double x) { return std::log(x); }, 1.0);
  CHECK(b.value == doctest::Approx(-1.0).epsilon(1e-11));
  const auto c = integrate_from_zero([](double x) { return std::pow(x, -0.9); }, 0.5);
  CHECK(c.value == doctest::Approx(10.0 * std::pow(0.5, 0.1)).epsilon(1e-9));
}

TEST_CASE("integrate_from_zero: divergent integrals are not reported as converged") {
  CHECK_FALSE(integrate_from_zero([](double t) { return 2.0 / t; }, 0.5).converged);
  CHECK_FALSE(
      integrate_from_zero([](double t) { return 1.0 / (t * std::sqrt(-std::log(t))); }, 0.3).converged);
  const auto res = integrate_from_zero([](double t) { return 1.0 / t; }, 0.5);
  CHECK_THROWS_AS(require_converged(res, "1/t"), NumericalError);
}

TEST_CASE("LELONG_MAX_EVALS caps the work") {
  ::setenv("LELONG_MAX_EVALS", "45", 1);
  CHECK(default_max_evals() == 45);
  const auto opts = default_quadrature_options();
  CHECK(opts.max_evals == 45);
  const auto res = integrate([](double x) { return std::sin(1.0 / x); }, 1e-3, 1.0, opts);
  CHECK(res.evals <= 45);
  CHECK_FALSE(res.converged);
  ::unsetenv("LELONG_MAX_EVALS");
  CHECK(default_max_evals() == 200000);
}
