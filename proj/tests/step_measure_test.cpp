#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "recur/errors.hpp"
#include "recur/measure.hpp"
#include "recur/step_function.hpp"

using namespace recur;

TEST_CASE("constant step function") {
  StepFunction f(2.5);
  CHECK(f(0.0) == 2.5);
  CHECK(f(100.0) == 2.5);
  CHECK(f.left_limit(1.0) == 2.5);
  CHECK(f.jump_count() == 0);
}

TEST_CASE("step function is right-continuous with strict left limits") {
  StepFunction f(0.0, {1.0, 2.0, 3.5}, {1.0, 3.0, 2.0});
  CHECK(f(0.999) == 0.0);
  CHECK(f(1.0) == 1.0);  // value at the jump is the post-jump value
  CHECK(f(1.5) == 1.0);
  CHECK(f(2.0) == 3.0);
  CHECK(f(3.5) == 2.0);
  CHECK(f(10.0) == 2.0);

  CHECK(f.left_limit(1.0) == 0.0);  // strictly before the first jump
  CHECK(f.left_limit(2.0) == 1.0);
  CHECK(f.left_limit(3.5) == 3.0);
  CHECK(f.left_limit(0.5) == 0.0);
  CHECK(f.left_limit(100.0) == 2.0);
}

TEST_CASE("left limit equals evaluation just below every jump") {
  StepFunction f(1.0, {0.5, 1.25, 2.0}, {2.0, 0.5, 4.0});
  for (double t : f.jump_times()) {
    CHECK(f.left_limit(t) == f(t - 1e-12));
  }
}

TEST_CASE("from_jumps accumulates increments") {
  StepFunction f = StepFunction::from_jumps(1.0, {1.0, 2.0}, {0.5, 0.25});
  CHECK(f(0.0) == 1.0);
  CHECK(f(1.0) == 1.5);
  CHECK(f(2.0) == 1.75);
}

TEST_CASE("step function rejects malformed jump sequences") {
  CHECK_THROWS_AS(StepFunction(0.0, {1.0, 1.0}, {1.0, 2.0}), TieViolation);
  CHECK_THROWS_AS(StepFunction(0.0, {2.0, 1.0}, {1.0, 2.0}), TieViolation);
  CHECK_THROWS_AS(StepFunction(0.0, {1.0}, {1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("measure integration truncates at the upper bound") {
  std::vector<double> atoms, masses;
  for (int k = 1; k <= 12; ++k) {
    atoms.push_back(0.1 * k);
    masses.push_back(1.0);
  }
  DiscreteMeasure w(atoms, masses);
  auto one = [](double) { return 1.0; };
  CHECK(w.integrate(one, 2.0) == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(w.integrate(one, 0.85) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(w.total_mass(2.0) == doctest::Approx(12.0));
  CHECK(w.count_within(0.85) == 8);
  CHECK(w.count_within(0.1) == 1);  // atoms at the bound are kept
}

TEST_CASE("measure integration weights by mass") {
  DiscreteMeasure w({0.5, 1.0, 1.5}, {1.0, 1.0, 0.5});
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(w.integrate([](double t) { return t; }, inf) == doctest::Approx(2.25).epsilon(1e-15));
}

TEST_CASE("measure integration is linear in the integrand and the masses") {
  DiscreteMeasure w({0.2, 0.7, 1.3, 2.9}, {0.5, 2.0, 0.25, 1.0});
  auto f = [](double t) { return t * t - 1.0; };
  auto g = [](double t) { return std::sin(t); };
  for (double upper : {0.5, 1.3, 5.0}) {
    const double lhs = w.integrate([&](double t) { return 2.0 * f(t) + 3.0 * g(t); }, upper);
    const double rhs = 2.0 * w.integrate(f, upper) + 3.0 * w.integrate(g, upper);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));

    DiscreteMeasure scaled = w;
    for (double& m : scaled.masses) m *= 1.75;
    CHECK(scaled.integrate(f, upper) == doctest::Approx(1.75 * w.integrate(f, upper)).epsilon(1e-14));
  }
}

TEST_CASE("zero-mass atoms are allowed, negative masses are not") {
  CHECK_NOTHROW(DiscreteMeasure({1.0, 2.0}, {0.0, 0.0}));
  CHECK_THROWS_AS(DiscreteMeasure({1.0}, {-0.5}), ConfigError);
  CHECK_THROWS_AS(DiscreteMeasure({1.0, 0.5}, {1.0, 1.0}), TieViolation);
  CHECK_THROWS_AS(DiscreteMeasure({1.0}, {1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("equispaced unit measure spans (0, span]") {
  DiscreteMeasure w = equispaced_unit_measure(1.2, 12);
  REQUIRE(w.size() == 12);
  CHECK(w.atoms.front() == doctest::Approx(0.1));
  CHECK(w.atoms.back() == doctest::Approx(1.2));
  for (double m : w.masses) CHECK(m == 1.0);
}
