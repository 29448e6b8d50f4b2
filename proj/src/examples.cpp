#include "ddestab/examples.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "ddestab/criteria.hpp"
#include "ddestab/limits.hpp"
#include "ddestab/oracle.hpp"
#include "ddestab/simulator.hpp"

namespace ddestab {

namespace {

Term term(const char* coeff, std::vector<Index> lags) {
  return Term{SeqExpr::parse(coeff),
              lags.size() == 1 ? DelaySpec::constant(lags[0]) : DelaySpec::periodic(std::move(lags))};
}

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

const Verdict* find(const std::vector<Verdict>& vs, std::string_view id) {
  const auto it = std::find_if(vs.begin(), vs.end(), [&](const Verdict& v) { return v.criterion == id; });
  return it == vs.end() ? nullptr : &*it;
}

double witness(const Verdict& v, const std::string& name) {
  const auto it = v.witnesses.find(name);
  return it == v.witnesses.end() ? std::nan("") : it->second;
}

ExampleCheck near(std::string name, double actual, double expected, double tol) {
  return {std::move(name), std::fabs(actual - expected) <= tol,
          fmt("expected %.17g, got %.17g", expected, actual) + fmt(" (tolerance %.3g)", tol)};
}

ExampleCheck outcome(std::string name, const Verdict* v, Outcome expected) {
  if (v == nullptr) return {std::move(name), false, "criterion not reported"};
  return {std::move(name), v->outcome == expected, "expected " + to_string(expected) + ", got " + to_string(v->outcome)};
}

ExampleCheck no_stable(const std::vector<Verdict>& vs) {
  std::string ids;
  for (const auto& v : vs) {
    if (v.stable()) ids += (ids.empty() ? "" : ", ") + v.criterion;
  }
  return {"no Stable verdict", ids.empty(), ids.empty() ? "none" : "stable: " + ids};
}

struct Entry {
  std::string id;
  std::string title;
  std::function<Equation()> equation;
  std::function<void(const Equation&, std::vector<ExampleCheck>&)> checks;
};

void factorial_checks(const Equation& eq, std::vector<ExampleCheck>& out) {
  const auto table = kernel(eq, 0, 20);
  double worst = 0.0;
  for (Index k = 0; k <= 20; ++k) {
    double expected = 1.0;
    for (Index n = k; n <= 20; ++n) {
      if (n > k) expected /= static_cast<double>(n);
      worst = std::max(worst, std::fabs(table.at(n, k) - expected));
    }
  }
  out.push_back({"X(n,k) = k!/n! for 0 <= k <= n <= 20", worst < 1e-12, fmt("max deviation %.3g", worst)});
  const auto scan = positivity_scan(eq, 0, 40);
  out.push_back({"kernel positive on [0, 40]", std::holds_alternative<PositivityCertificate>(scan), ""});
  const auto fit = fit_decay(fundamental(eq, 0, 150), default_skip(eq));
  out.push_back({"decay faster than any geometric rate", fit.super_exponential, fmt("mu_hat %.6g", fit.mu_hat)});
}

void sin_cos_checks(const Equation& eq, std::vector<ExampleCheck>& out) {
  const auto v = check_corollary8(eq, 1);
  out.push_back(outcome("corollary8 part 1 Stable", &v, Outcome::stable));
  const double a0 = witness(v, "a0"), a1 = witness(v, "a1");
  out.push_back({"a(n) range inside (0, 0.25]", a0 > 0.0 && a1 <= 0.25, fmt("range [%.17g, %.17g]", a0, a1)});
  const double gamma = witness(v, "gamma");
  out.push_back({"gamma <= 0.1/0.15", gamma <= 0.667 + 1e-9, fmt("gamma %.17g", gamma)});
  const auto fit = fit_decay_log(fundamental_log_magnitude(eq, 0, 2000), default_skip(eq));
  out.push_back({"fitted decay rate below one", fit.decays(), fmt("mu_hat %.17g", fit.mu_hat)});
  const std::size_t first[] = {0};
  const auto t2 = check_theorem2(eq, first, 1);
  out.push_back(outcome("theorem2 with the first term dominant Stable", &t2, Outcome::stable));
}

void alternating_checks(const Equation& eq, std::vector<ExampleCheck>& out) {
  const auto v = check_corollary8(eq, 1);
  out.push_back(outcome("corollary8 part 1 Stable", &v, Outcome::stable));
  out.push_back(near("gamma", witness(v, "gamma"), 0.21 / 0.22, 1e-12));
  out.push_back(near("first-term window sum", witness(v, "window_sum"), 0.24, 1e-12));
  const auto classical = check_classical(eq);
  const auto* pi = find(classical, "classical_pi_half");
  out.push_back(outcome("pi/2 test Inconclusive", pi, Outcome::inconclusive));
  out.push_back(near("delayed absolute sum", pi ? witness(*pi, "diagnostic_sum") : std::nan(""), 1.78, 1e-12));
}

void periodic_checks(const Equation& eq, std::vector<ExampleCheck>& out) {
  out.push_back(near("a + b at even n", eq.coeff_sum(100), 0.05, 1e-12));
  out.push_back(near("a + b at odd n", eq.coeff_sum(101), 0.03, 1e-12));
  const auto all = all_indices(eq);
  out.push_back(near("sum of a + b over [n-5, n-1]",
                     delayed_sum(eq, all, DelaySpec::constant(5), SumUpper::to_n_minus_1).value, 0.21, 1e-12));
  const DelaySpec h = eq.term(1).delay;
  const std::vector<DelaySpec> g{h, h};
  out.push_back(near("mismatch term at even n", comparison_gap_lhs(eq, all, g, 100), 0.0348, 1e-12));
  out.push_back(near("mismatch term at odd n", comparison_gap_lhs(eq, all, g, 101), 0.0275, 1e-12));
  const auto v = check_corollary4(eq, all, g);
  out.push_back(outcome("corollary4 with common delay h Stable", &v, Outcome::stable));
  const double gamma = witness(v, "gamma_min");
  out.push_back({"gamma_min < 0.95", gamma < 0.95, fmt("gamma_min %.17g", gamma)});
}

void vanishing_checks(const Equation& eq, std::vector<ExampleCheck>& out) {
  const auto x = fundamental(eq, 0, 500);
  const auto low = std::min_element(x.begin(), x.end());
  out.push_back({"X(n,0) > 1/2 for n <= 500", *low > 0.5, fmt("min %.17g", *low)});
  long double product = 1.0L;
  for (int k = 0; k < 200; ++k) product *= 1.0L - std::pow(3.0L, -static_cast<long double>(k + 1));
  out.push_back(near("X(500,0) against the infinite product", x.back(), static_cast<double>(product), 1e-10));
  const auto verdicts = run_all(eq);
  out.push_back(no_stable(verdicts));
  out.push_back(outcome("theorem1 Inconclusive", find(verdicts, "theorem1"), Outcome::inconclusive));
}

void growth_checks(const Equation& eq, std::vector<ExampleCheck>& out) {
  const auto x = fundamental(eq, 0, 60);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < x.size(); ++n) worst = std::min(worst, x[n] / x[n - 1]);
  out.push_back({"X(n,0) > 1.5 X(n-1,0) for 1 <= n <= 60", worst > 1.5, fmt("min ratio %.17g", worst)});
  out.push_back(near("companion radius", companion_radius(eq).radius, (3.0 + std::sqrt(0.2)) / 2.0, 1e-6));
  out.push_back(no_stable(run_all(eq)));
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"example1", "factorial kernel", [] { return validate({term("1 - 1/(n+1)", {0})}); }, factorial_checks},
      {"example2a", "sine/cosine coefficients, delays 1 and 20",
       [] { return validate({term("0.2+0.05*sin(n)", {1}), term("0.1*abs(cos(n))", {20})}); }, sin_cos_checks},
      {"example2b", "alternating coefficients, delays 2 and 14",
       [] { return validate({term("0.12+0.1*alt(n)", {2}), term("0.1+0.11*alt(n)", {14})}); }, alternating_checks},
      {"example3", "two-periodic coefficients and delays",
       [] { return validate({term("per(-0.12,-0.05)", {3, 5}), term("per(0.17,0.08)", {4, 8})}); },
       periodic_checks},
      {"example4", "summable coefficient, kernel bounded away from zero",
       [] { return validate({term("3^(-n-1)", {0})}); }, vanishing_checks},
      {"example5", "positive growing kernel", [] { return validate({term("2.2", {1}), term("-2", {0})}); },
       growth_checks},
  };
  return entries;
}

const Entry& entry(std::string_view id) {
  for (const auto& e : registry()) {
    if (e.id == id) return e;
  }
  throw std::invalid_argument("unknown example: " + std::string(id));
}

}  // namespace

bool ExampleResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ExampleCheck& c) { return c.passed; });
}

const std::vector<std::string>& example_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.push_back(e.id);
    return out;
  }();
  return ids;
}

Equation example_equation(std::string_view id) { return entry(id).equation(); }

ExampleResult run_example(std::string_view id) {
  const Entry& e = entry(id);
  ExampleResult result{e.id, e.title, {}};
  const Equation eq = e.equation();
  try {
    e.checks(eq, result.checks);
  } catch (const std::exception& ex) {
    result.checks.push_back({"evaluation", false, ex.what()});
  }
  return result;
}

nlohmann::ordered_json examples_json(std::span<const ExampleResult> results) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  bool all = true;
  for (const auto& r : results) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    list.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed()}, {"checks", std::move(checks)}});
    all = all && r.passed();
  }
  nlohmann::ordered_json out;
  out["all_passed"] = all;
  out["examples"] = std::move(list);
  return out;
}

}  // namespace ddestab
