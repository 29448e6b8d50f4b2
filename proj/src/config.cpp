#include "ddestab/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ddestab/simulator.hpp"

namespace ddestab {

using nlohmann::json;
using nlohmann::ordered_json;

ConfigError::ConfigError(const std::string& where, const std::string& message)
    : std::runtime_error(where + ": " + message), where_(where) {}

namespace {

void require_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

Index integer(const json& v, const std::string& where, Index min) {
  if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
  const auto x = v.get<Index>();
  if (x < min) throw ConfigError(where, "must be at least " + std::to_string(min));
  return x;
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where, "expected a string");
  return v.get<std::string>();
}

SeqExpr expression(const std::string& source, const std::string& where) {
  try {
    return SeqExpr::parse(source);
  } catch (const ParseError& e) {
    // The parser message already names the position.
    throw ConfigError(where, e.what());
  }
}

DelaySpec delay_of(const std::vector<Index>& lags) {
  return lags.size() == 1 ? DelaySpec::constant(lags[0]) : DelaySpec::periodic(lags);
}

ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json window_json(IndexWindow w) { return ordered_json::array({w.start, w.end}); }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

JobConfig parse_config(std::string_view source) {
  json root;
  try {
    root = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError("byte " + std::to_string(e.byte), "malformed JSON");
  }
  require_keys(root, "", {"schema", "equation", "horizon", "window", "checks", "seed", "n0", "history"});
  if (!root.contains("schema")) throw ConfigError("schema", "missing");
  if (integer(root["schema"], "schema", 0) != 1) throw ConfigError("schema", "only schema 1 is supported");

  JobConfig config;
  if (!root.contains("equation")) throw ConfigError("equation", "missing");
  const json& eq = root["equation"];
  require_keys(eq, "equation", {"terms", "forcing"});
  if (!eq.contains("terms") || !eq["terms"].is_array() || eq["terms"].empty()) {
    throw ConfigError("equation.terms", "expected a nonempty array");
  }
  for (std::size_t i = 0; i < eq["terms"].size(); ++i) {
    const std::string where = "equation.terms[" + std::to_string(i) + "]";
    const json& t = eq["terms"][i];
    require_keys(t, where, {"coeff", "lag"});
    if (!t.contains("coeff")) throw ConfigError(where + ".coeff", "missing");
    if (!t.contains("lag")) throw ConfigError(where + ".lag", "missing");
    TermConfig term;
    term.coeff = text(t["coeff"], where + ".coeff");
    (void)expression(term.coeff, where + ".coeff");
    if (t["lag"].is_array()) {
      if (t["lag"].empty()) throw ConfigError(where + ".lag", "expected a nonempty array");
      for (std::size_t j = 0; j < t["lag"].size(); ++j) {
        term.lags.push_back(integer(t["lag"][j], where + ".lag[" + std::to_string(j) + "]", 0));
      }
    } else {
      term.lags.push_back(integer(t["lag"], where + ".lag", 0));
    }
    config.terms.push_back(std::move(term));
  }
  if (eq.contains("forcing")) {
    config.forcing = text(eq["forcing"], "equation.forcing");
    (void)expression(*config.forcing, "equation.forcing");
  }

  if (root.contains("horizon")) config.horizon = integer(root["horizon"], "horizon", 1);
  if (root.contains("window")) {
    const json& w = root["window"];
    if (!w.is_array() || w.size() != 2) throw ConfigError("window", "expected [n0, N]");
    const IndexWindow window{integer(w[0], "window[0]", 0), integer(w[1], "window[1]", 0)};
    if (window.end < window.start) throw ConfigError("window", "N must not precede n0");
    config.window = window;
  }
  if (root.contains("checks")) {
    const json& c = root["checks"];
    if (c.is_string()) {
      if (c.get<std::string>() != "all") throw ConfigError("checks", "expected \"all\" or a list of criterion ids");
    } else if (c.is_array()) {
      const auto& known = criterion_ids();
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const std::string where = "checks[" + std::to_string(i) + "]";
        auto id = text(c[i], where);
        if (std::find(known.begin(), known.end(), id) == known.end()) throw ConfigError(where, "unknown criterion " + id);
        ids.push_back(std::move(id));
      }
      config.checks = std::move(ids);
    } else {
      throw ConfigError("checks", "expected \"all\" or a list of criterion ids");
    }
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
    config.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("n0")) config.n0 = integer(root["n0"], "n0", 0);
  if (root.contains("history")) {
    const json& h = root["history"];
    if (!h.is_array()) throw ConfigError("history", "expected an array of numbers");
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (!h[i].is_number()) throw ConfigError("history[" + std::to_string(i) + "]", "expected a number");
      config.history.push_back(h[i].get<double>());
    }
  }
  return config;
}

JobConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Equation build_equation(const JobConfig& config) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < config.terms.size(); ++i) {
    const auto where = "equation.terms[" + std::to_string(i) + "]";
    terms.push_back(Term{expression(config.terms[i].coeff, where + ".coeff"), delay_of(config.terms[i].lags)});
  }
  std::optional<SeqExpr> forcing;
  if (config.forcing) forcing = expression(*config.forcing, "equation.forcing");
  try {
    return validate(std::move(terms), std::move(forcing));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("equation", e.what());
  } catch (const EvalError& e) {
    throw ConfigError("equation", std::string(e.what()) + " (index " + std::to_string(e.index()) + ")");
  }
}

ordered_json equation_json(const Equation& eq) {
  ordered_json terms = ordered_json::array();
  for (const auto& t : eq.terms()) {
    ordered_json term;
    term["coeff"] = t.coeff.to_string();
    if (t.delay.period() == 1) {
      term["lag"] = t.delay.lag_at(0);
    } else {
      term["lag"] = t.delay.lags();
    }
    terms.push_back(std::move(term));
  }
  ordered_json out;
  out["terms"] = std::move(terms);
  if (eq.forcing()) out["forcing"] = eq.forcing()->to_string();
  return out;
}

ordered_json verdict_json(const Verdict& v) {
  ordered_json out;
  out["criterion"] = v.criterion;
  out["outcome"] = to_string(v.outcome);
  out["claim"] = to_string(v.claim);
  out["citation"] = v.citation;
  ordered_json witnesses = ordered_json::object();
  for (const auto& [name, value] : v.witnesses) witnesses[name] = number(value);
  out["witnesses"] = std::move(witnesses);
  out["window"] = window_json(v.window);
  out["window_certified"] = v.window_certified;
  if (!v.note.empty()) out["note"] = v.note;
  return out;
}

OracleSummary run_oracles(const Equation& eq, Index horizon) {
  OracleSummary out;
  const Index skip = default_skip(eq);
  if (horizon >= skip + 49) out.fit = fit_decay_log(fundamental_log_magnitude(eq, 0, horizon), skip);
  if (eq.is_autonomous()) out.spectral = companion_radius(eq);
  return out;
}

ordered_json oracle_json(const OracleSummary& oracle) {
  ordered_json out = ordered_json::object();
  if (oracle.fit) {
    const auto& f = *oracle.fit;
    ordered_json fit;
    fit["column"] = 0;
    fit["mu_hat"] = number(f.mu_hat);
    fit["L_hat"] = number(f.L_hat);
    fit["window"] = window_json(f.window);
    fit["residual"] = number(f.residual);
    fit["degenerate"] = f.degenerate;
    fit["super_exponential"] = f.super_exponential;
    fit["decays"] = f.decays();
    out["decay_fit"] = std::move(fit);
  }
  if (oracle.spectral) {
    ordered_json s;
    s["radius"] = number(oracle.spectral->radius);
    s["error_bound"] = number(oracle.spectral->error_bound);
    s["dimension"] = oracle.spectral->dimension;
    out["spectral"] = std::move(s);
  }
  return out;
}

ordered_json meta_json() { return {{"tool", "ddestab"}, {"version", "1.0.0"}, {"generated", utc_now()}}; }

ordered_json report_json(const ReportInput& input) {
  if (input.equation == nullptr) throw std::invalid_argument("report_json: equation missing");
  ordered_json out;
  out["report"] = "ddestab";
  out["schema"] = 1;
  if (input.meta) out["meta"] = meta_json();
  out["equation"] = equation_json(*input.equation);
  if (input.seed) out["seed"] = *input.seed;
  ordered_json verdicts = ordered_json::array();
  ordered_json stable = ordered_json::array();
  for (const auto& v : input.verdicts) {
    verdicts.push_back(verdict_json(v));
    if (v.stable()) stable.push_back(v.criterion);
  }
  out["stable"] = std::move(stable);
  out["verdicts"] = std::move(verdicts);
  out["oracle"] = oracle_json(input.oracle);
  out["artifacts"] = input.artifacts;
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move output into " + path.string());
  }
}

}  // namespace ddestab
