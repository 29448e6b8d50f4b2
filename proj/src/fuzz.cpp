#include "ddestab/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "ddestab/criteria.hpp"
#include "ddestab/oracle.hpp"
#include "ddestab/simulator.hpp"

namespace ddestab {

namespace {

// Bit-exact across standard libraries, unlike std::uniform_real_distribution.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Index below(std::mt19937_64& rng, Index n) { return static_cast<Index>(rng() % static_cast<std::uint64_t>(n)); }

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

constexpr std::uint64_t kStream = 0x9e3779b97f4a7c15ULL;

void checker_vs_radius(std::uint64_t seed, std::vector<Counterexample>& out) {
  RandomEquationOptions opts;
  opts.autonomous = true;
  const Equation eq = random_equation(seed, opts);
  const double radius = companion_radius(eq).radius;
  if (radius < 1.0) return;
  for (const auto& v : run_all(eq)) {
    if (v.stable() && !v.window_certified) {
      out.push_back({"checker_vs_radius", seed, v.criterion + " Stable with companion radius " + number(radius)});
    }
  }
}

void nonoscillation_bound(std::uint64_t seed, std::vector<Counterexample>& out) {
  std::mt19937_64 rng(seed ^ kStream);
  const Index k = 1 + below(rng, 6);
  const double a = nonoscillation_threshold(k) * (0.05 + 0.95 * unit(rng));
  if (!check_autonomous_nonosc(a, k)) {
    out.push_back({"nonoscillation_bound", seed, "a = " + number(a) + " below the threshold rejected"});
    return;
  }
  const auto x = fundamental(validate({Term{SeqExpr::constant(a), DelaySpec::constant(k)}}), 0, 400);
  const auto low = std::min_element(x.begin(), x.end());
  if (*low <= 0.0) {
    out.push_back({"nonoscillation_bound", seed,
                   "a = " + number(a) + ", k = " + std::to_string(k) + ": X(" +
                       std::to_string(low - x.begin()) + ", 0) = " + number(*low)});
  }
}

void tail_equivalence(std::uint64_t seed, std::vector<Counterexample>& out) {
  const Equation eq = random_equation(seed);
  std::mt19937_64 rng(seed ^ (kStream << 1));
  const Index n1 = below(rng, 30);
  std::vector<SeqExpr> prefix;
  for (std::size_t l = 0; l < eq.size(); ++l) {
    prefix.push_back(SeqExpr::parse(number(4.0 * unit(rng) - 2.0) + "*cos(" + std::to_string(1 + below(rng, 5)) + "*n)"));
  }
  if (!tail_equivalence_test(eq, n1, prefix, 800)) {
    out.push_back({"tail_equivalence", seed, "decay class changed after a prefix of length " + std::to_string(n1)});
  }
}

void representation(std::uint64_t seed, std::vector<Counterexample>& out) {
  const Equation eq = random_equation(seed);
  std::mt19937_64 rng(seed ^ (kStream << 2));
  const Index n0 = below(rng, 4);
  std::vector<double> history(static_cast<std::size_t>(eq.T() + 1));
  for (double& h : history) h = 2.0 * unit(rng) - 1.0;
  const InitialData init(n0, eq.T(), history);
  const SeqExpr f = SeqExpr::parse(number(unit(rng)) + "*sin(n)-" + number(0.5 * unit(rng)));
  const Index N = n0 + 50;
  const double residual = representation_check(eq, init, f, N);
  const auto sim = simulate(with_forcing(eq, f), init, N);
  double scale = 1.0;
  for (double v : sim.values) scale = std::max(scale, std::fabs(v));
  if (!(residual <= 1e-9 * scale)) {
    out.push_back({"representation", seed, "residual " + number(residual) + " at scale " + number(scale)});
  }
}

}  // namespace

FuzzSummary run_fuzz(const FuzzOptions& opts) {
  FuzzSummary summary;
  for (std::size_t i = 0; i < opts.count; ++i) {
    const std::uint64_t seed = opts.seed + i;
    for (auto property : {checker_vs_radius, nonoscillation_bound, tail_equivalence, representation}) {
      try {
        property(seed, summary.counterexamples);
      } catch (const std::exception& e) {
        summary.counterexamples.push_back({"evaluation", seed, e.what()});
      }
    }
    ++summary.cases;
  }
  return summary;
}

nlohmann::ordered_json fuzz_json(const FuzzOptions& opts, const FuzzSummary& summary) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& c : summary.counterexamples) {
    list.push_back({{"property", c.property}, {"seed", c.seed}, {"detail", c.detail}});
  }
  nlohmann::ordered_json out;
  out["seed"] = opts.seed;
  out["count"] = opts.count;
  out["cases"] = summary.cases;
  out["passed"] = summary.passed();
  out["counterexamples"] = std::move(list);
  return out;
}

}  // namespace ddestab
