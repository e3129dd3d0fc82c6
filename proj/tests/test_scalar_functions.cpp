#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opgx/errors.hpp"
#include "opgx/scalar_functions.hpp"

#include <cmath>

using namespace opgx;
using F = WeightFunction::Family;

TEST_CASE("evaluation examples") {
  CHECK(WeightFunction(F::cubic)(0.5) == 0.375);
  CHECK(ScalarFunction::power(2, Interval::closed(0, 10))(3.0) == 9.0);
  CHECK(WeightFunction(F::reciprocal)(0.25) == 4.0);
  CHECK(WeightFunction(F::half_cubic)(0.5) == 0.1875);
  CHECK(WeightFunction(F::constant_one)(0.3) == 1.0);
  CHECK(WeightFunction(F::power, 1.3)(0.5) == doctest::Approx(std::pow(0.5, 1.3)).epsilon(1e-15));
}

TEST_CASE("evaluation outside the domain is a domain error") {
  const ScalarFunction f = ScalarFunction::power(1.5, Interval::closed(1, 2));
  try {
    (void)f(3.0);
    FAIL("expected a domain error");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  CHECK_THROWS_AS((void)WeightFunction(F::identity)(1.5), NumericalError);
  CHECK_THROWS_AS(WeightFunction(F::reciprocal, 1.0, Interval::closed(0, 1)), UsageError);
}

TEST_CASE("construction validates non-negativity on K") {
  CHECK_THROWS_AS(ScalarFunction::polynomial({-1, 1}, Interval::closed(0, 10)), UsageError);
  CHECK_NOTHROW(ScalarFunction::polynomial({-1, 1}, Interval::closed(1, 10)));
  CHECK(ScalarFunction::power(2, Interval::closed(0, 1))(0.0) == 0.0);
  CHECK(ScalarFunction::power(2, Interval::closed(0, 1)).vanishes_at_zero());
  CHECK_FALSE(ScalarFunction::polynomial({1, 1}, Interval::closed(0, 1)).vanishes_at_zero());
  CHECK_FALSE(ScalarFunction::power(0, Interval::closed(0, 1)).vanishes_at_zero());
}

TEST_CASE("combine examples") {
  const Interval k = Interval::closed(0, 10);
  const ScalarFunction a = ScalarFunction::power(1.2, k);
  const ScalarFunction b = ScalarFunction::power(1.8, k);
  CHECK(combine(Combine::sum, a, &b)(1.0) == doctest::Approx(2.0).epsilon(1e-15));
  const ScalarFunction sq = ScalarFunction::power(2, k);
  CHECK(combine(Combine::scale, sq, nullptr, 3.0)(2.0) == doctest::Approx(12.0).epsilon(1e-15));
  const ScalarFunction other = ScalarFunction::power(2, Interval::closed(0, 5));
  CHECK_THROWS_AS(combine(Combine::sum, sq, &other), UsageError);
  CHECK_THROWS_AS(combine(Combine::scale, sq, nullptr, -1.0), UsageError);
}

TEST_CASE("text syntax parses and round-trips") {
  const Interval k = Interval::closed(0, 10);
  for (const char* text : {"power:s=1.5", "poly:1,0,2", "sum(power:s=1.2,power:s=1.8)", "scale:3(power:s=2)"}) {
    const ScalarFunction f = parse_function(text, k);
    const ScalarFunction g = parse_function(f.spec(), k);
    for (double x : {0.0, 0.5, 2.0, 9.0}) CHECK(f(x) == g(x));
  }
  CHECK(parse_function("poly:1,0,2", k)(2.0) == 9.0);
  CHECK(parse_function("scale:3(power:s=2)", k)(2.0) == 12.0);
  CHECK(parse_function("power:s=3", k).power_exponent() == std::optional<double>(3.0));
  CHECK_FALSE(parse_function("poly:0,1", k).power_exponent());
  CHECK_THROWS_AS(parse_function("wobble:3", k), UsageError);
  CHECK_THROWS_AS(parse_function("sum(power:s=1", k), UsageError);
  for (const char* text : {"identity", "power:s=1.3", "one", "recip", "cubic", "half_cubic"})
    CHECK(parse_weight(text).spec() == text);
  CHECK_THROWS_AS(parse_weight("quartic"), UsageError);
}

TEST_CASE("cubic super-multiplicativity discrepancy matches the closed form") {
  const WeightFunction h(F::cubic);
  double worst = 0.0;
  for (int i = 0; i <= 199; ++i) {
    for (int j = 0; j <= 199; ++j) {
      const double x = i / 199.0, y = j / 199.0;
      const double closed = x * y * (x + y) * (1 - x) * (1 - y);
      worst = std::max(worst, std::abs(supermultiplicative_discrepancy(h, x, y) - closed));
    }
  }
  CHECK(worst <= 1e-12);
  const HypothesisReport rep = check_supermultiplicative(h, Interval::closed(0, 1), 200, 0, 1);
  CHECK(rep.holds);
  CHECK(rep.min_discrepancy >= -1e-12);
  CHECK(rep.samples_used == 200 * 200);
}

TEST_CASE("identity and power weights have zero discrepancy") {
  for (const WeightFunction& h : {WeightFunction(F::identity), WeightFunction(F::power, 0.7),
                                  WeightFunction(F::power, 2.5)}) {
    const HypothesisReport rep = check_supermultiplicative(h, Interval::closed(0, 1), 50, 500, 3);
    CHECK(rep.holds);
    CHECK(std::abs(rep.min_discrepancy) <= 1e-15);
  }
}

TEST_CASE("every shipped weight family is super-multiplicative on its default domain") {
  for (F fam : {F::identity, F::power, F::constant_one, F::reciprocal, F::cubic, F::half_cubic}) {
    const WeightFunction h(fam, 1.3);
    const HypothesisReport rep = check_supermultiplicative(h, h.domain(), 64, 256, 0);
    CAPTURE(h.spec());
    CHECK(rep.holds);
  }
}

TEST_CASE("super-multiplicativity scan skips products outside J") {
  const WeightFunction h(F::identity, 1.0, Interval::closed(0, 4));
  const HypothesisReport rep = check_supermultiplicative(h, Interval::closed(0.5, 4), 10, 0, 0);
  CHECK(rep.samples_skipped > 0);
  CHECK(rep.samples_used + rep.samples_skipped == 100);
}

TEST_CASE("cubic weight stops being super-multiplicative beyond [0,1]") {
  // xy(x+y)(1-x)(1-y) < 0 for x > 1 > y.
  const WeightFunction h(F::cubic, 1.0, Interval::closed(0, 2));
  const HypothesisReport rep = check_supermultiplicative(h, Interval::closed(0, 2), 41, 0, 0);
  CHECK_FALSE(rep.holds);
  CHECK(rep.min_discrepancy < -1e-3);
  REQUIRE(rep.arg_min.size() == 2);
  CHECK((rep.arg_min[0] - 1) * (rep.arg_min[1] - 1) < 0);
}

TEST_CASE("half condition examples") {
  const HypothesisReport cubic = check_half_condition(WeightFunction(F::cubic), 999);
  CHECK(std::abs(cubic.min_discrepancy) <= 1e-12);
  REQUIRE(cubic.arg_min.size() == 1);
  CHECK(cubic.arg_min[0] == doctest::Approx(0.5));
  CHECK(cubic.holds);

  const HypothesisReport id = check_half_condition(WeightFunction(F::identity), 999);
  CHECK(std::abs(id.min_discrepancy) <= 1e-15);
  CHECK(id.holds);

  const HypothesisReport half = check_half_condition(WeightFunction(F::half_cubic), 999);
  CHECK(std::abs(half.min_discrepancy) <= 1e-12);
  CHECK(half.arg_min[0] == doctest::Approx(0.5));

  // α^{-1/2} drops below 2h(1/2) = √2 near α = 1.
  CHECK_FALSE(check_half_condition(WeightFunction(F::power, 0.5), 99).holds);
}

TEST_CASE("two h(1/2) values for the cubic weights") {
  CHECK(2 * WeightFunction(F::cubic)(0.5) == 0.75);
  CHECK(2 * WeightFunction(F::half_cubic)(0.5) == 0.375);
}

TEST_CASE("power classification examples and ratio invariance") {
  const PowerClassification a = classify_power_function(1.5, 1);
  CHECK(a.member);
  CHECK(a.operator_convex);
  CHECK_FALSE(a.operator_monotone);
  const PowerClassification b = classify_power_function(3, 1);
  CHECK_FALSE(b.member);
  CHECK_FALSE(b.operator_convex);
  CHECK_FALSE(b.operator_monotone);
  CHECK_FALSE(classify_power_function(1, 2).member);
  CHECK(classify_power_function(1, 2).ratio == 0.5);
  CHECK(classify_power_function(0.5, 1).operator_monotone);
  for (double s : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
    for (double c : {0.1, 3.0, 7.0})
      CHECK(classify_power_function(s, 1).member == classify_power_function(s * c, c).member);
  CHECK(classify_power_function(2, 1).member);
  CHECK(classify_power_function(1, 1).member);
  CHECK_THROWS_AS(classify_power_function(1, 0), UsageError);
}
