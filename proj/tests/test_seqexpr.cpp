#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "ddestab/seqexpr.hpp"

using namespace ddestab;

TEST_CASE("parse and evaluate reference sequences") {
  CHECK(SeqExpr::parse("0.2 + 0.05*sin(n)").eval(0) == 0.2);
  CHECK(SeqExpr::parse("0").eval(17) == 0.0);
  CHECK(SeqExpr::parse("3^(-n-1)").eval(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(SeqExpr::parse("3^(-n-1)").eval(4) == doctest::Approx(std::pow(3.0, -5.0)).epsilon(1e-15));
  CHECK(SeqExpr::parse("per(0.12, 0.22)").eval(3) == 0.22);
  CHECK(SeqExpr::parse("0.12+0.1*alt(n)").eval(0) == doctest::Approx(0.22).epsilon(1e-15));
  CHECK(SeqExpr::parse("0.12+0.1*alt(n)").eval(1) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(SeqExpr::parse("0.12+0.1*alt").eval(1) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(SeqExpr::parse("1 - 1/(n+1)").eval(0) == 0.0);
  CHECK(SeqExpr::parse("1 - 1/(n+1)").eval(3) == doctest::Approx(0.75));
  CHECK(SeqExpr::parse("0.1*abs(cos(n))").eval(2) == doctest::Approx(0.1 * std::fabs(std::cos(2.0))));
}

TEST_CASE("precedence and associativity") {
  CHECK(SeqExpr::parse("2^3^2").eval(0) == 512.0);
  CHECK(SeqExpr::parse("-2^2").eval(0) == -4.0);
  CHECK(SeqExpr::parse("2*-3").eval(0) == -6.0);
  CHECK(SeqExpr::parse("1-2-3").eval(0) == -4.0);
  CHECK(SeqExpr::parse("8/4/2").eval(0) == 1.0);
  CHECK(SeqExpr::parse("1+2*3").eval(0) == 7.0);
  CHECK(SeqExpr::parse("2^-1").eval(0) == 0.5);
  CHECK(SeqExpr::parse("1e-3*n").eval(2) == 0.002);
  CHECK(SeqExpr::parse("alt(n+1)").eval(0) == -1.0);
}

TEST_CASE("syntax errors carry a position") {
  auto position_of = [](const char* text) -> std::size_t {
    try {
      (void)SeqExpr::parse(text);
    } catch (const ParseError& e) {
      return e.position();
    }
    FAIL("expected ParseError for " << text);
    return 0;
  };
  CHECK(position_of("1 + ") == 4);
  CHECK(position_of("(1 + 2") == 6);
  CHECK(position_of("1 $ 2") == 2);
  CHECK(position_of("foo(n)") == 0);
  CHECK_THROWS_AS(SeqExpr::parse("per()"), ParseError);
  CHECK_THROWS_AS(SeqExpr::parse("per(n, 1)"), ParseError);
  CHECK_THROWS_AS(SeqExpr::parse("splice(1.5, 1, 2)"), ParseError);
  CHECK_THROWS_AS(SeqExpr::parse(""), ParseError);
  CHECK_THROWS_AS(SeqExpr::parse("1 2"), ParseError);
}

TEST_CASE("domain errors are reported lazily with the offending index") {
  const auto e = SeqExpr::parse("1/(n-3)");
  CHECK(e.eval(2) == -1.0);
  try {
    (void)e.eval(3);
    FAIL("expected EvalError");
  } catch (const EvalError& err) {
    CHECK(err.index() == 3);
  }
  CHECK_THROWS_AS((void)SeqExpr::parse("(-1)^0.5").eval(0), EvalError);
  CHECK_THROWS_AS((void)SeqExpr::parse("10^(400*n)").eval(1), EvalError);
  CHECK_THROWS_AS((void)SeqExpr::parse("alt(n/2)").eval(1), EvalError);
}

TEST_CASE("classify") {
  CHECK(classify(SeqExpr::parse("0.1*alt(n)"), 256) == SeqClass{SeqClass::Tag::periodic, 2});
  CHECK(classify(SeqExpr::parse("sin(n)"), 256).tag == SeqClass::Tag::general);
  CHECK(classify(SeqExpr::parse("5"), 256) == SeqClass{SeqClass::Tag::constant, 1});
  CHECK(classify(SeqExpr::parse("per(1,2,1,2)"), 256) == SeqClass{SeqClass::Tag::periodic, 2});
  CHECK(classify(SeqExpr::parse("per(3,3,3)"), 256) == SeqClass{SeqClass::Tag::constant, 1});
  CHECK(classify(SeqExpr::parse("alt(n)*alt(n)"), 256) == SeqClass{SeqClass::Tag::constant, 1});
  CHECK(classify(SeqExpr::parse("per(1,2)+per(0,0,5)"), 256) == SeqClass{SeqClass::Tag::periodic, 6});
  CHECK(classify(SeqExpr::parse("1 - 1/(n+1)"), 256).tag == SeqClass::Tag::general);
  CHECK(classify(SeqExpr::parse("sin(3.141592653589793*n)"), 256).tag == SeqClass::Tag::general);
  CHECK(classify(SeqExpr::parse("cos(n)^2 + sin(n)^2"), 256).tag != SeqClass::Tag::periodic);
  CHECK(classify(SeqExpr::parse("splice(5, 1, 2)"), 256).tag == SeqClass::Tag::general);
  CHECK(classify(SeqExpr::parse("n - n + 2"), 256) == SeqClass{SeqClass::Tag::constant, 1});
}

TEST_CASE("bounds on a window") {
  const auto e = SeqExpr::parse("0.2+0.05*sin(n)");
  const auto r = bounds_on_window(e, 0, 1000);
  double lo = e.eval(0);
  double hi = lo;
  for (Index n = 0; n <= 1000; ++n) {
    lo = std::min(lo, 0.2 + 0.05 * std::sin(static_cast<double>(n)));
    hi = std::max(hi, 0.2 + 0.05 * std::sin(static_cast<double>(n)));
  }
  CHECK(r.inf >= 0.15);
  CHECK(r.sup <= 0.25);
  CHECK(r.inf == doctest::Approx(lo).epsilon(1e-15));
  CHECK(r.sup == doctest::Approx(hi).epsilon(1e-15));

  const auto c = bounds_on_window(SeqExpr::constant(0.7), 5, 50);
  CHECK(c.inf == 0.7);
  CHECK(c.sup == 0.7);

  const auto a = bounds_on_window(SeqExpr::parse("alt(n)"), 0, 3);
  CHECK(a.inf == -1.0);
  CHECK(a.sup == 1.0);

  CHECK_THROWS_AS((void)bounds_on_window(SeqExpr::parse("1/(n-3)"), 0, 10), EvalError);
}

TEST_CASE("DelaySpec") {
  const auto d = DelaySpec::periodic({4, 8});
  CHECK(d.period() == 2);
  CHECK(d.max_lag() == 8);
  CHECK(d.min_lag() == 4);
  CHECK(d.argument(10) == 6);
  CHECK(d.argument(11) == 3);
  CHECK(d.to_string() == "per(4,8)");
  CHECK(DelaySpec::constant(3).to_string() == "3");
  CHECK(DelaySpec::periodic({2, 2}).is_constant());
  CHECK_THROWS_AS(DelaySpec::constant(-1), std::invalid_argument);
  CHECK_THROWS_AS(DelaySpec::periodic({}), std::invalid_argument);
  CHECK_THROWS_AS(DelaySpec::periodic({1, -2}), std::invalid_argument);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Index> lags(1 + rng() % 5);
    for (auto& l : lags) l = static_cast<Index>(rng() % 12);
    const auto spec = DelaySpec::periodic(lags);
    for (Index n = 0; n < 500; ++n) {
      REQUIRE(spec.argument(n) <= n);
      REQUIRE(n - spec.argument(n) <= spec.max_lag());
    }
  }
}

namespace {

// Random expression text drawn from the full grammar.
class ExprGen {
 public:
  explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

  std::string expr(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(11)) {
      case 0: return "(" + expr(depth - 1) + " + " + expr(depth - 1) + ")";
      case 1: return "(" + expr(depth - 1) + " - " + expr(depth - 1) + ")";
      case 2: return expr(depth - 1) + "*" + expr(depth - 1);
      case 3: return "(" + expr(depth - 1) + ")/(" + expr(depth - 1) + ")";
      case 4: return "-" + expr(depth - 1);
      case 5: return "(" + expr(depth - 1) + ")^" + small_int();
      case 6: return "sin(" + expr(depth - 1) + ")";
      case 7: return "cos(" + expr(depth - 1) + ")";
      case 8: return "abs(" + expr(depth - 1) + ")";
      case 9: return "per(" + number() + "," + number() + (pick(2) ? "," + number() : "") + ")";
      default: return "splice(" + std::to_string(pick(20)) + ", " + expr(depth - 1) + ", " + expr(depth - 1) + ")";
    }
  }

 private:
  std::string leaf() {
    switch (pick(4)) {
      case 0: return "n";
      case 1: return "alt";
      case 2: return "alt(n+" + std::to_string(pick(3)) + ")";
      default: return number();
    }
  }
  std::string number() {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", u(rng_));
    return std::string("(") + buf + ")";
  }
  std::string small_int() { return std::to_string(pick(4)); }
  int pick(int k) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(k)); }

  std::mt19937_64 rng_;
};

// Value at n, or NaN when evaluation throws.
double value_or_nan(const SeqExpr& e, Index n) {
  try {
    return e.eval(n);
  } catch (const EvalError&) {
    return std::nan("");
  }
}

bool same_value(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return a == b;
}

}  // namespace

TEST_CASE("print/parse round trip on random expressions") {
  ExprGen gen(20240601);
  std::mt19937_64 idx_rng(99);
  for (int i = 0; i < 1000; ++i) {
    const std::string text = gen.expr(1 + i % 4);
    const SeqExpr original = SeqExpr::parse(text);
    const std::string printed = original.to_string();
    const SeqExpr reparsed = SeqExpr::parse(printed);
    CAPTURE(text);
    CAPTURE(printed);
    REQUIRE(reparsed.to_string() == printed);
    for (int k = 0; k < 100; ++k) {
      const Index n = static_cast<Index>(idx_rng() % 10001);
      REQUIRE(same_value(value_or_nan(original, n), value_or_nan(reparsed, n)));
    }
  }
}

TEST_CASE("classify soundness on random expressions") {
  ExprGen gen(777);
  int periodic_seen = 0;
  for (int i = 0; i < 1000; ++i) {
    const SeqExpr e = SeqExpr::parse(gen.expr(1 + i % 3));
    const SeqClass cls = classify(e, 256);
    if (!cls.exact()) continue;
    if (cls.tag == SeqClass::Tag::periodic) ++periodic_seen;
    const Index p = cls.period;
    CAPTURE(e.to_string());
    for (Index n = 0; n <= 40 * p; ++n) {
      REQUIRE(same_value(value_or_nan(e, n), value_or_nan(e, n + p)));
    }
  }
  CHECK(periodic_seen > 0);
}
