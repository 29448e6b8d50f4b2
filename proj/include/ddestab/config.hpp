#pragma once

// JSON job configuration (schema 1) and JSON reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ddestab/criteria.hpp"
#include "ddestab/equation.hpp"
#include "ddestab/oracle.hpp"

namespace ddestab {

/// Configuration error; `where` is a JSON path or a byte offset description.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& message);
  [[nodiscard]] const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

struct TermConfig {
  std::string coeff;
  /// One entry for a constant lag, several for a periodic table.
  std::vector<Index> lags;
};

struct JobConfig {
  std::vector<TermConfig> terms;
  std::optional<std::string> forcing;
  Index horizon = 100;
  std::optional<IndexWindow> window;
  /// nullopt runs every criterion; an empty list runs none.
  std::optional<std::vector<std::string>> checks;
  std::optional<std::uint64_t> seed;
  /// Initial point and history x(n0 - T), ..., x(n0) for simulate.
  Index n0 = 0;
  std::vector<double> history;
};

/// Unknown keys, wrong types and bad expressions raise ConfigError.
[[nodiscard]] JobConfig parse_config(std::string_view text);
[[nodiscard]] JobConfig load_config(const std::filesystem::path& path);
[[nodiscard]] Equation build_equation(const JobConfig& config);

/// Terms and forcing in the config's own shape.
[[nodiscard]] nlohmann::ordered_json equation_json(const Equation& eq);
[[nodiscard]] nlohmann::ordered_json verdict_json(const Verdict& v);

struct OracleSummary {
  /// Fit of X(n, 0) over [0, horizon]; absent when the horizon is too short.
  std::optional<DecayFit> fit;
  std::optional<SpectralReport> spectral;
};

[[nodiscard]] OracleSummary run_oracles(const Equation& eq, Index horizon);
[[nodiscard]] nlohmann::ordered_json oracle_json(const OracleSummary& oracle);

struct ReportInput {
  const Equation* equation = nullptr;
  std::vector<Verdict> verdicts;
  OracleSummary oracle;
  std::vector<std::string> artifacts;
  std::optional<std::uint64_t> seed;
  /// Adds tool name and generation time.
  bool meta = true;
};

/// {"tool", "version", "generated"}; the only nondeterministic part of any report.
[[nodiscard]] nlohmann::ordered_json meta_json();

[[nodiscard]] nlohmann::ordered_json report_json(const ReportInput& input);

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace ddestab
