// Command-line front end: check, simulate, fundamental, examples, fuzz.
// Exit codes: 0 success, 1 expectation or property failure, 2 usage or config error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ddestab/config.hpp"
#include "ddestab/criteria.hpp"
#include "ddestab/examples.hpp"
#include "ddestab/fuzz.hpp"
#include "ddestab/simulator.hpp"

namespace {

using namespace ddestab;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Globals {
  std::string out;
  std::string csv;
  std::vector<Index> window;
  std::optional<std::uint64_t> seed;
  bool json = false;
  bool no_meta = false;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_atomic(path, text);
  }
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::optional<IndexWindow> window_of(const Globals& g, const JobConfig& config) {
  if (!g.window.empty()) {
    if (g.window[1] < g.window[0]) throw ConfigError("--window", "N1 must not precede N0");
    return IndexWindow{g.window[0], g.window[1]};
  }
  return config.window;
}

std::string fundamental_csv(const Equation& eq, Index k, Index N) {
  std::ostringstream out;
  write_fundamental_csv(out, k, fundamental(eq, k, N), product_bound(eq, k, N));
  return out.str();
}

int cmd_check(const Globals& g, const std::string& path) {
  const JobConfig config = load_config(path);
  const Equation eq = build_equation(config);
  CheckOptions opts;
  opts.window = window_of(g, config);

  ReportInput input;
  input.equation = &eq;
  input.meta = !g.no_meta;
  input.seed = g.seed ? g.seed : config.seed;
  if (!config.checks) {
    input.verdicts = run_all(eq, opts);
  } else if (!config.checks->empty()) {
    input.verdicts = run_selected(eq, *config.checks, opts);
  }
  input.oracle = run_oracles(eq, config.horizon);
  if (!g.csv.empty()) {
    write_atomic(g.csv, fundamental_csv(eq, 0, config.horizon));
    input.artifacts.push_back(g.csv);
  }
  emit(g.out, dump(report_json(input)));
  return kOk;
}

std::vector<double> parse_history(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--history", "not a number: '" + item + "'");
    }
  }
  return values;
}

int cmd_simulate(const Globals& g, const std::string& path, const std::string& history) {
  JobConfig config = load_config(path);
  const Equation eq = build_equation(config);
  if (!history.empty()) config.history = parse_history(history);
  const auto need = static_cast<std::size_t>(eq.T() + 1);
  if (config.history.size() != need) {
    throw ConfigError("history", "incomplete history: need x(n0 - " + std::to_string(eq.T()) + "), ..., x(n0), " +
                                     std::to_string(need) + " values, got " + std::to_string(config.history.size()));
  }
  const InitialData init(config.n0, eq.T(), config.history);
  std::ostringstream out;
  write_trajectory_csv(out, simulate(eq, init, config.n0 + config.horizon));
  emit(g.csv.empty() ? g.out : g.csv, out.str());
  return kOk;
}

int cmd_fundamental(const Globals& g, const std::string& path, Index k, std::optional<Index> N) {
  const JobConfig config = load_config(path);
  const Equation eq = build_equation(config);
  const Index end = N ? *N : k + config.horizon;
  if (end < k) throw ConfigError("--N", "must be at least k");
  emit(g.csv.empty() ? g.out : g.csv, fundamental_csv(eq, k, end));
  return kOk;
}

int cmd_examples(const Globals& g, const std::vector<std::string>& only) {
  const auto& ids = only.empty() ? example_ids() : only;
  std::vector<ExampleResult> results;
  for (const auto& id : ids) results.push_back(run_example(id));
  bool all = true;
  for (const auto& r : results) all = all && r.passed();

  if (g.json) {
    nlohmann::ordered_json out;
    if (!g.no_meta) out["meta"] = meta_json();
    out.update(examples_json(results));
    emit(g.out, dump(out));
  } else {
    std::ostringstream out;
    for (const auto& r : results) {
      out << (r.passed() ? "PASS " : "FAIL ") << r.id << "  " << r.title << '\n';
      for (const auto& c : r.checks) {
        if (!c.passed) out << "  failed: " << c.name << ": " << c.detail << '\n';
      }
    }
    out << results.size() << " fixtures, " << (all ? "all passed" : "failures present") << '\n';
    emit(g.out, out.str());
  }
  return all ? kOk : kFailed;
}

int cmd_fuzz(const Globals& g, std::optional<std::uint64_t> seeds, std::size_t count) {
  FuzzOptions opts;
  opts.seed = seeds ? *seeds : g.seed.value_or(0);
  opts.count = count;
  const FuzzSummary summary = run_fuzz(opts);
  if (g.json) {
    nlohmann::ordered_json out;
    if (!g.no_meta) out["meta"] = meta_json();
    out.update(fuzz_json(opts, summary));
    emit(g.out, dump(out));
  } else {
    std::ostringstream out;
    for (const auto& c : summary.counterexamples) {
      out << "counterexample " << c.property << " seed " << c.seed << ": " << c.detail << '\n';
    }
    out << summary.cases << " cases from seed " << opts.seed << ", " << summary.counterexamples.size()
        << " counterexamples\n";
    emit(g.out, out.str());
  }
  return summary.passed() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis for linear delay difference equations"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--out", g.out, "Write the report or listing here instead of stdout");
  app.add_option("--csv", g.csv, "Write CSV data here");
  app.add_option("--window", g.window, "Index window N0 N1 for asymptotic hypotheses")->expected(2);
  app.add_option("--seed", g.seed, "Seed recorded in the report; default fuzz seed");
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_flag("--no-meta", g.no_meta, "Omit tool version and timestamp");

  std::string config_path;
  auto* check = app.add_subcommand("check", "Run the stability criteria and oracles on a config");
  check->add_option("config", config_path, "JSON config")->required();

  std::string history;
  auto* sim = app.add_subcommand("simulate", "Trajectory CSV n,value");
  sim->add_option("config", config_path, "JSON config")->required();
  sim->add_option("--history", history, "Comma-separated x(n0 - T), ..., x(n0)");

  Index k = 0;
  std::optional<Index> N;
  auto* fund = app.add_subcommand("fundamental", "Column X(n, k) with the product bound, CSV n,value,bound");
  fund->add_option("config", config_path, "JSON config")->required();
  fund->add_option("--k", k, "Launch index")->check(CLI::NonNegativeNumber);
  fund->add_option("--N", N, "Last index (default k + horizon)");

  std::vector<std::string> only;
  auto* ex = app.add_subcommand("examples", "Reproduce the built-in reference examples");
  ex->add_option("--only", only, "Restrict to these example ids")->check(CLI::IsMember(example_ids()));

  std::optional<std::uint64_t> seeds;
  std::size_t count = 200;
  auto* fz = app.add_subcommand("fuzz", "Seeded property suite against independent oracles");
  fz->add_option("--seeds", seeds, "First seed");
  fz->add_option("--count", count, "Number of seeds")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(g, config_path);
    if (*sim) return cmd_simulate(g, config_path, history);
    if (*fund) return cmd_fundamental(g, config_path, k, N);
    if (*ex) return cmd_examples(g, only);
    if (*fz) return cmd_fuzz(g, seeds, count);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
