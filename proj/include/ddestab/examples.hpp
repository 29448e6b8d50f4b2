#pragma once

// Built-in reference equations with pinned expectations.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ddestab/equation.hpp"

namespace ddestab {

struct ExampleCheck {
  std::string name;
  bool passed = false;
  /// Expected and computed values.
  std::string detail;
};

struct ExampleResult {
  std::string id;
  std::string title;
  std::vector<ExampleCheck> checks;

  [[nodiscard]] bool passed() const;
};

[[nodiscard]] const std::vector<std::string>& example_ids();
/// Throws std::invalid_argument for an unknown id.
[[nodiscard]] Equation example_equation(std::string_view id);
[[nodiscard]] ExampleResult run_example(std::string_view id);

/// {"all_passed": bool, "examples": [{"id", "title", "passed", "checks": [...]}]}.
[[nodiscard]] nlohmann::ordered_json examples_json(std::span<const ExampleResult> results);

}  // namespace ddestab
