#pragma once

// Seeded property suite comparing the checkers against independent oracles.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ddestab {

struct FuzzOptions {
  std::uint64_t seed = 0;
  /// Cases per property; seeds seed, seed + 1, ..., seed + count - 1.
  std::size_t count = 200;
};

struct Counterexample {
  std::string property;
  std::uint64_t seed = 0;
  std::string detail;
};

struct FuzzSummary {
  std::size_t cases = 0;
  std::vector<Counterexample> counterexamples;

  [[nodiscard]] bool passed() const noexcept { return counterexamples.empty(); }
};

/// Properties, each run once per seed:
///   checker_vs_radius       no exact Stable verdict when the companion radius is >= 1
///   nonoscillation_bound    0 < a <= threshold(k) gives a positive kernel for a x(n - k)
///   tail_equivalence        changing coefficients on a finite prefix keeps the decay class
///   representation          solution equals its kernel representation (relative 1e-9)
[[nodiscard]] FuzzSummary run_fuzz(const FuzzOptions& opts);

[[nodiscard]] nlohmann::ordered_json fuzz_json(const FuzzOptions& opts, const FuzzSummary& summary);

}  // namespace ddestab
