#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "ddestab/examples.hpp"
#include "ddestab/fuzz.hpp"
#include "fixtures.hpp"

using namespace ddestab;

TEST_CASE("registry") {
  CHECK(example_ids() == std::vector<std::string>{"example1", "example2a", "example2b", "example3", "example4", "example5"});
  CHECK_THROWS_AS((void)example_equation("example6"), std::invalid_argument);
  CHECK_THROWS_AS((void)run_example("nope"), std::invalid_argument);

  // Registry equations agree with the independently written fixtures.
  const auto same = [](const Equation& a, const Equation& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t l = 0; l < a.size(); ++l) {
      CHECK(a.term(l).delay == b.term(l).delay);
      for (Index n = 0; n < 50; ++n) CHECK(a.coeff(l, n) == b.coeff(l, n));
    }
  };
  same(example_equation("example1"), fixtures::factorial_decay());
  same(example_equation("example2a"), fixtures::sin_cos_pair());
  same(example_equation("example2b"), fixtures::alternating_pair());
  same(example_equation("example3"), fixtures::periodic_pair());
  same(example_equation("example4"), fixtures::shrinking_coefficient());
  same(example_equation("example5"), fixtures::unstable_pair());
}

TEST_CASE("every fixture passes its pinned checks") {
  std::vector<ExampleResult> results;
  for (const auto& id : example_ids()) {
    results.push_back(run_example(id));
    const auto& r = results.back();
    CHECK_FALSE(r.checks.empty());
    for (const auto& c : r.checks) {
      INFO(r.id << ": " << c.name << ": " << c.detail);
      CHECK(c.passed);
    }
  }
  const auto j = examples_json(results);
  CHECK(j["all_passed"] == true);
  CHECK(j["examples"].size() == 6);
  CHECK(j.dump() == examples_json(results).dump());
}

TEST_CASE("failed checks make the fixture fail") {
  ExampleResult r{"x", "y", {{"a", true, ""}, {"b", false, "delta"}}};
  CHECK_FALSE(r.passed());
  CHECK(examples_json(std::span<const ExampleResult>(&r, 1))["all_passed"] == false);
  CHECK(ExampleResult{}.passed());
}

TEST_CASE("fuzz suite") {
  const auto summary = run_fuzz({0, 200});
  CHECK(summary.cases == 200);
  for (const auto& c : summary.counterexamples) {
    INFO(c.property << " seed " << c.seed << ": " << c.detail);
    CHECK(false);
  }
  const auto one = run_fuzz({0, 1});
  CHECK(one.cases == 1);
  CHECK(fuzz_json({0, 1}, one).dump() == fuzz_json({0, 1}, run_fuzz({0, 1})).dump());
  CHECK(run_fuzz({1000, 25}).passed());
}
