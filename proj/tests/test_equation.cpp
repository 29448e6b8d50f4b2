#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ddestab/equation.hpp"
#include "fixtures.hpp"

using namespace ddestab;
using fixtures::term;

TEST_CASE("validate records K and T") {
  const auto eq = fixtures::sin_cos_pair();
  CHECK(eq.T() == 20);
  CHECK(eq.K() <= 0.25);
  CHECK(eq.K() >= 0.2499);
  CHECK(eq.k_window_certified());
  CHECK_FALSE(eq.combined_period().has_value());

  const auto zero = validate({term("0", 0)});
  CHECK(zero.K() == 0.0);
  CHECK(zero.T() == 0);
  CHECK(zero.is_autonomous());

  const auto pair = fixtures::unstable_pair();
  CHECK(pair.T() == 1);
  CHECK(pair.K() == 2.2);
  CHECK_FALSE(pair.k_window_certified());
  CHECK(pair.combined_period() == 1);

  const auto periodic = fixtures::periodic_pair();
  CHECK(periodic.T() == 8);
  CHECK(periodic.K() == 0.17);
  CHECK(periodic.combined_period() == 2);
  CHECK_FALSE(periodic.is_autonomous());
}

TEST_CASE("validate rejects bad input") {
  CHECK_THROWS_AS((void)validate({}), std::invalid_argument);
  CHECK_THROWS_AS((void)validate({term("1", 10)}, std::nullopt, 50), std::invalid_argument);
  CHECK_NOTHROW((void)validate({term("1", 10)}, std::nullopt, 110));
  CHECK_THROWS_AS((void)validate({term("1/(n-5)", 1)}), EvalError);
}

TEST_CASE("subset_equation") {
  const auto eq = fixtures::sin_cos_pair();
  const std::vector<std::size_t> first{0};
  const auto one = subset_equation(eq, first);
  CHECK(one.size() == 1);
  CHECK(one.T() == 1);
  CHECK(one.coeff(0, 3) == eq.coeff(0, 3));

  const auto all = all_indices(eq);
  const auto same = subset_equation(eq, all);
  REQUIRE(same.size() == eq.size());
  for (std::size_t l = 0; l < eq.size(); ++l) {
    CHECK(same.term(l).delay == eq.term(l).delay);
    for (Index n = 0; n < 50; ++n) CHECK(same.coeff(l, n) == eq.coeff(l, n));
  }
  const auto twice = subset_equation(subset_equation(eq, all), all_indices(same));
  CHECK(twice.K() == same.K());
  CHECK(twice.T() == same.T());

  const std::vector<std::size_t> reversed{1, 0};
  CHECK(subset_equation(eq, reversed).term(0).delay == DelaySpec::constant(20));
  CHECK_THROWS_AS((void)subset_equation(eq, std::vector<std::size_t>{}), std::invalid_argument);
  CHECK_THROWS_AS((void)subset_equation(eq, std::vector<std::size_t>{5}), std::out_of_range);

  const auto forced = with_forcing(eq, SeqExpr::parse("1"));
  CHECK_FALSE(subset_equation(forced, all).forcing().has_value());
}

TEST_CASE("prefix_modify splices coefficients") {
  const auto eq = fixtures::autonomous({{0.3, 2}});
  const std::vector<SeqExpr> zeros{SeqExpr::constant(0.0)};
  CHECK(prefix_modify(eq, 0, zeros).coeff(0, 0) == 0.3);
  const auto spliced = prefix_modify(eq, 5, zeros);
  for (Index n = 0; n < 5; ++n) CHECK(spliced.coeff(0, n) == 0.0);
  for (Index n = 5; n < 20; ++n) CHECK(spliced.coeff(0, n) == 0.3);
  CHECK(spliced.term(0).delay == eq.term(0).delay);
  CHECK_FALSE(spliced.coefficients_exact());
  CHECK_THROWS_AS((void)prefix_modify(eq, 5, std::vector<SeqExpr>{}), std::invalid_argument);
}

TEST_CASE("aggregate and delay replacement") {
  const auto eq = fixtures::alternating_pair();
  const auto agg = aggregate_equation(eq, all_indices(eq), DelaySpec::constant(2));
  for (Index n = 0; n < 10; ++n) CHECK(agg.coeff(0, n) == doctest::Approx(eq.coeff_sum(n)));
  CHECK(agg.T() == 2);
  CHECK(agg.combined_period() == 2);

  const std::vector<DelaySpec> delays{DelaySpec::constant(1), DelaySpec::constant(3)};
  const auto moved = with_delays(eq, delays);
  CHECK(moved.T() == 3);
  CHECK(moved.coeff(1, 4) == eq.coeff(1, 4));
}

TEST_CASE("InitialData covers the history window") {
  const InitialData init(10, 3, {1.0, 2.0, 3.0, 4.0});
  CHECK(init.first() == 7);
  CHECK(init.at(7) == 1.0);
  CHECK(init.at(10) == 4.0);
  CHECK_THROWS_AS((void)init.at(6), std::out_of_range);
  CHECK_THROWS_AS((void)init.at(11), std::out_of_range);
  CHECK_THROWS_AS(InitialData(0, 2, {1.0}), std::invalid_argument);
  const auto p = InitialData::point(0, 2, 5.0);
  CHECK(p.at(-2) == 0.0);
  CHECK(p.at(0) == 5.0);
}
