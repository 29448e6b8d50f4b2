// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "ddestab/criteria.hpp"
#include "ddestab/oracle.hpp"
#include "ddestab/simulator.hpp"
#include "fixtures.hpp"

#ifndef DDESTAB_CLI
#error "DDESTAB_CLI must name the command-line binary"
#endif

using namespace ddestab;

namespace {

struct Result {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const Verdict* find(const std::vector<Verdict>& vs, const std::string& id) {
  for (const auto& v : vs) {
    if (v.criterion == id) return &v;
  }
  return nullptr;
}

double witness(const Verdict& v, const std::string& name) {
  const auto it = v.witnesses.find(name);
  return it == v.witnesses.end() ? std::nan("") : it->second;
}

bool any_stable(const std::vector<Verdict>& vs) {
  return std::any_of(vs.begin(), vs.end(), [](const Verdict& v) { return v.stable(); });
}

void ac1(Result& r) {
  const auto start = Clock::now();
  const auto kern = kernel(fixtures::factorial_decay(), 0, 20);
  double worst = 0.0;
  for (Index k = 0; k <= 20; ++k) {
    double exact = 1.0;
    for (Index n = k; n <= 20; ++n) {
      if (n > k) exact /= static_cast<double>(n);
      worst = std::max(worst, std::fabs(kern.at(n, k) - exact));
    }
  }
  const double t = seconds_since(start);
  r.detail << "max |X(n,k) - k!/n!| = " << worst << ", " << t << " s";
  r.require(worst < 1e-12, "error >= 1e-12");
  r.require(t < 0.1, "runtime >= 0.1 s");
}

void ac2(Result& r) {
  using Big = boost::multiprecision::cpp_dec_float_50;
  const auto start = Clock::now();
  const auto x = fundamental(fixtures::shrinking_coefficient(), 0, 500);
  const double low = *std::min_element(x.begin(), x.end());
  Big product = 1;
  Big power = 1;
  for (int k = 0; k < 200; ++k) {
    power /= 3;
    product *= 1 - power;
  }
  const double limit = product.convert_to<double>();
  const double t = seconds_since(start);
  r.detail << "min X(n,0) = " << low << ", |X(500,0) - product| = " << std::fabs(x.back() - limit) << ", " << t
           << " s";
  r.require(low > 0.5, "X(n,0) <= 1/2");
  r.require(std::fabs(x.back() - limit) <= 1e-10, "limit mismatch");
  r.require(t < 0.1, "runtime >= 0.1 s");
}

void ac3(Result& r) {
  const auto eq = fixtures::unstable_pair();
  const auto x = fundamental(eq, 0, 60);
  double ratio = INFINITY;
  for (std::size_t n = 1; n < x.size(); ++n) ratio = std::min(ratio, x[n] / x[n - 1]);
  const double radius = companion_radius(eq).radius;
  const double expected = (3.0 + std::sqrt(0.2)) / 2.0;
  const bool stable = any_stable(run_all(eq));
  r.detail << "min X(n,0)/X(n-1,0) = " << ratio << ", radius = " << radius << ", Stable verdicts: " << stable;
  r.require(ratio > 1.5, "growth factor");
  r.require(std::fabs(radius - expected) <= 1e-6, "radius");
  r.require(!stable, "a checker claimed stability");
}

void ac4(Result& r) {
  const auto eq = fixtures::sin_cos_pair();
  const auto v = check_corollary8(eq, 1);
  const double a0 = witness(v, "a0"), a1 = witness(v, "a1"), gamma = witness(v, "gamma");
  const auto fit = fit_decay_log(fundamental_log_magnitude(eq, 0, 2000), default_skip(eq));
  r.detail << to_string(v.outcome) << ", a in [" << a0 << ", " << a1 << "], gamma = " << gamma
           << ", mu_hat = " << fit.mu_hat;
  r.require(v.stable(), "not Stable");
  r.require(a0 > 0.0 && a1 <= 0.25, "a-range");
  r.require(gamma <= 0.667 + 1e-9, "gamma");
  r.require(fit.mu_hat < 1.0, "mu_hat");
}

void ac5(Result& r) {
  const auto eq = fixtures::alternating_pair();
  const auto v = check_corollary8(eq, 1);
  const auto classical = check_classical(eq);
  const Verdict* pi = find(classical, "classical_pi_half");
  const double diag = pi ? witness(*pi, "diagnostic_sum") : std::nan("");
  r.detail << to_string(v.outcome) << ", diagnostic sum = " << diag << ", pi/2 test "
           << (pi ? to_string(pi->outcome) : "missing");
  r.require(v.stable(), "not Stable");
  r.require(std::fabs(diag - 1.78) <= 1e-12, "diagnostic sum");
  r.require(pi && pi->outcome == Outcome::inconclusive, "pi/2 outcome");
}

void ac6(Result& r) {
  const auto eq = fixtures::periodic_pair();
  std::vector<std::size_t> all{0, 1};
  const DelaySpec h = eq.term(1).delay;
  const std::vector<DelaySpec> g{h, h};
  // Direct sums of the coefficient tables.
  const double even = eq.coeff(0, 100) + eq.coeff(1, 100);
  const double odd = eq.coeff(0, 101) + eq.coeff(1, 101);
  // sup over n of sum_{j=n-5}^{n-1} (a(j) + b(j)); both parities of n.
  double window = -INFINITY;
  for (Index n : {100, 101}) {
    double s = 0.0;
    for (Index j = n - 5; j < n; ++j) s += eq.coeff(0, j) + eq.coeff(1, j);
    window = std::max(window, s);
  }
  const double lhs_even = comparison_gap_lhs(eq, all, g, 100);
  const double lhs_odd = comparison_gap_lhs(eq, all, g, 101);
  const auto v = check_corollary4(eq, all, g);
  const double gamma = witness(v, "gamma_min");
  r.detail << "sums " << even << "/" << odd << ", window " << window << ", products " << lhs_even << "/" << lhs_odd
           << ", " << to_string(v.outcome) << " gamma_min = " << gamma;
  r.require(std::fabs(even - 0.05) <= 1e-12 && std::fabs(odd - 0.03) <= 1e-12, "sums");
  r.require(std::fabs(window - 0.21) <= 1e-12 && window <= 0.25, "window sum");
  r.require(std::fabs(lhs_even - 0.0348) <= 1e-12 && std::fabs(lhs_odd - 0.0275) <= 1e-12, "products");
  r.require(v.stable() && gamma < 0.95, "comparison checker");
}

void ac7(Result& r) {
  const auto start = Clock::now();
  double worst = 0.0, worst_relative = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto eq = random_equation(seed);
    std::mt19937_64 rng(seed + 7);
    std::vector<double> history(static_cast<std::size_t>(eq.T() + 1));
    for (double& v : history) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    const InitialData init(0, eq.T(), history);
    const SeqExpr f = SeqExpr::parse("0.3*cos(n)-0.1");
    const double residual = representation_check(eq, init, f, 50);
    const auto sim = simulate(with_forcing(eq, f), init, 50);
    double scale = 1.0;
    for (double v : sim.values) scale = std::max(scale, std::fabs(v));
    worst = std::max(worst, residual);
    worst_relative = std::max(worst_relative, residual / scale);
  }
  const double t = seconds_since(start);
  r.detail << "max residual = " << worst << " (relative " << worst_relative << "), " << t << " s";
  r.require(worst < 1e-9, "absolute residual >= 1e-9");
  r.require(t < 1.0, "runtime >= 1 s");
}

void ac8(Result& r) {
  std::vector<Equation> cases{fixtures::factorial_decay(), fixtures::sin_cos_pair(), fixtures::alternating_pair(),
                              fixtures::periodic_pair(), fixtures::shrinking_coefficient(), fixtures::unstable_pair()};
  const std::size_t fixture_count = cases.size();
  for (std::uint64_t seed = 0; seed < 100; ++seed) cases.push_back(random_equation(seed));

  constexpr Index N = 60;
  double worst = 0.0;
  for (const auto& eq : cases) {
    const auto kern = kernel(eq, 0, N);
    for (Index k = 0; k <= N; ++k) {
      const auto b = product_bound(eq, k, N);
      for (Index n = k; n <= N; ++n) {
        // Ratio above one means the bound is violated.
        worst = std::max(worst, std::fabs(kern.at(n, k)) / b[static_cast<std::size_t>(n - k)]);
      }
    }
  }

  int lemma_cases = 0;
  double low = INFINITY, high = -INFINITY;
  for (std::size_t i = 0; i < fixture_count; ++i) {
    const auto& eq = cases[i];
    bool nonnegative = true;
    for (std::size_t l = 0; l < eq.size(); ++l) {
      for (Index n = 0; n <= 400; ++n) nonnegative = nonnegative && eq.coeff(l, n) >= 0.0;
    }
    if (!nonnegative || !std::holds_alternative<PositivityCertificate>(certify_positivity(eq))) continue;
    ++lemma_cases;
    const auto s = lemma6_sum(eq, 0, 400);
    for (std::size_t n = static_cast<std::size_t>(eq.T()); n < s.size(); ++n) {
      low = std::min(low, s[n]);
      high = std::max(high, s[n]);
    }
  }
  r.detail << "max |X|/bound = " << worst << " over " << cases.size() << " equations; lemma sum range [" << low
           << ", " << high << "] over " << lemma_cases << " fixtures";
  r.require(worst <= 1.0 + 1e-12, "product bound");
  r.require(lemma_cases > 0, "no fixture qualified");
  r.require(low >= -1e-10 && high <= 1.0 + 1e-10, "lemma sum range");
}

void ac9(Result& r) {
  const auto start = Clock::now();
  RandomEquationOptions opts;
  opts.autonomous = true;
  int unsound = 0, compared = 0;
  double worst_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto eq = random_equation(seed, opts);
    const double radius = companion_radius(eq).radius;
    if (radius >= 1.0) {
      for (const auto& v : run_all(eq)) unsound += v.stable() && !v.window_certified;
    }
    if (radius >= 0.2 && radius <= 0.98) {
      const auto fit = fit_decay_log(fundamental_log_magnitude(eq, 0, 2000), default_skip(eq));
      worst_gap = std::max(worst_gap, std::fabs(fit.mu_hat - radius));
      ++compared;
    }
  }
  const double t = seconds_since(start);
  r.detail << unsound << " unsound verdicts, max |mu_hat - radius| = " << worst_gap << " over " << compared
           << " equations, " << t << " s";
  r.require(unsound == 0, "Stable with radius >= 1");
  r.require(worst_gap <= 0.02, "rate consistency");
  r.require(t < 10.0, "runtime >= 10 s");
}

void ac10(Result& r) {
  for (double a : {0.05, 0.1, 0.2}) {
    const auto eq = fixtures::autonomous({{a, 1}});
    const auto fit = fit_decay_log(fundamental_log_magnitude(eq, 0, 2000), default_skip(eq));
    r.detail << "a = " << a << ": mu_hat = " << fit.mu_hat << "; ";
    r.require(a <= nonoscillation_threshold(1), "a above the nonoscillation bound");
    r.require(fit.mu_hat <= 1.0 - a + 0.05, "rate for a = " + std::to_string(a));
  }
}

void ac11(Result& r) {
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto eq = random_equation(seed);
    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    const auto n1 = static_cast<Index>(rng() % 40);
    std::vector<SeqExpr> prefix;
    for (std::size_t l = 0; l < eq.size(); ++l) {
      const double amp = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 4.0 - 2.0;
      prefix.push_back(SeqExpr::parse(std::to_string(amp) + "*cos(" + std::to_string(1 + rng() % 5) + "*n)"));
    }
    agree += tail_equivalence_test(eq, n1, prefix, 800);
  }
  r.detail << agree << "/100 pairs agree in decay class";
  r.require(agree == 100, "decay class changed");
}

std::string capture(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  if (status != 0) out += "\n<exit status " + std::to_string(status) + ">";
  return out;
}

void ac12(Result& r) {
  const std::string command = std::string("\"") + DDESTAB_CLI + "\" examples --json --no-meta";
  const auto first = capture(command);
  const auto second = capture(command);
  r.detail << first.size() << " bytes per run";
  r.require(!first.empty() && first.find("\"all_passed\"") != std::string::npos, "no JSON output");
  r.require(first.find("<exit status") == std::string::npos, "nonzero exit");
  r.require(first == second, "outputs differ");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Result&)>>> criteria{
      {"AC1 ", ac1}, {"AC2 ", ac2}, {"AC3 ", ac3}, {"AC4 ", ac4},   {"AC5 ", ac5},   {"AC6 ", ac6},
      {"AC7 ", ac7}, {"AC8 ", ac8}, {"AC9 ", ac9}, {"AC10", ac10}, {"AC11", ac11}, {"AC12", ac12},
  };
  std::cout.precision(6);
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Result r;
    r.detail.precision(6);
    try {
      run(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail << " [exception: " << e.what() << "]";
    }
    failed += !r.passed;
    std::cout << name << ' ' << (r.passed ? "PASS" : "FAIL") << "  " << r.detail.str() << std::endl;
  }
  std::cout << (12 - failed) << "/12 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
