#include "ddestab/equation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ddestab {

namespace {

constexpr Index kDefaultValidationWindow = 1000;

Index probe_length_for(Index window_len) { return std::clamp<Index>(window_len, 64, 256); }

}  // namespace

Index min_validation_window(Index max_lag) { return 10 * (1 + max_lag); }

bool Equation::coefficients_exact() const noexcept {
  return std::all_of(classes_.begin(), classes_.end(), [](const SeqClass& c) { return c.exact(); });
}

std::optional<Index> Equation::combined_period() const {
  Index period = 1;
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    if (!classes_[l].exact()) return std::nullopt;
    period = lcm_period(period, classes_[l].period);
    period = lcm_period(period, terms_[l].delay.period());
  }
  return period;
}

bool Equation::is_autonomous() const noexcept {
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    if (classes_[l].tag != SeqClass::Tag::constant || !terms_[l].delay.is_constant()) return false;
  }
  return true;
}

double Equation::coeff_sum(Index n) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coeff.eval(n);
  return s;
}

double Equation::coeff_abs_sum(Index n) const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::fabs(t.coeff.eval(n));
  return s;
}

Equation validate(std::vector<Term> terms, std::optional<SeqExpr> forcing, Index window_len) {
  if (terms.empty()) throw std::invalid_argument("validate: equation needs at least one term");
  Index max_lag = 0;
  for (const auto& t : terms) {
    if (t.delay.min_lag() < 0) throw std::invalid_argument("validate: negative lag");
    max_lag = std::max(max_lag, t.delay.max_lag());
  }
  if (window_len == 0) window_len = std::max(kDefaultValidationWindow, min_validation_window(max_lag));
  if (window_len < min_validation_window(max_lag)) {
    throw std::invalid_argument("validate: window_len " + std::to_string(window_len) + " < 10*(1+T) = " +
                                std::to_string(min_validation_window(max_lag)));
  }

  Equation eq;
  eq.window_ = {0, window_len - 1};
  eq.max_lag_ = max_lag;
  for (const auto& t : terms) {
    const auto range = bounds_on_window(t.coeff, 0, window_len - 1);
    eq.k_bound_ = std::max({eq.k_bound_, std::fabs(range.inf), std::fabs(range.sup)});
    eq.classes_.push_back(classify(t.coeff, probe_length_for(window_len)));
  }
  if (forcing) (void)bounds_on_window(*forcing, 0, window_len - 1);
  eq.terms_ = std::move(terms);
  eq.forcing_ = std::move(forcing);
  return eq;
}

std::vector<std::size_t> all_indices(const Equation& eq) {
  std::vector<std::size_t> idx(eq.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

Equation subset_equation(const Equation& eq, std::span<const std::size_t> indices) {
  if (indices.empty()) throw std::invalid_argument("subset_equation: empty index set");
  std::vector<Term> terms;
  for (std::size_t l : indices) {
    if (l >= eq.size()) throw std::out_of_range("subset_equation: term index " + std::to_string(l));
    terms.push_back(eq.term(l));
  }
  return validate(std::move(terms), std::nullopt, eq.validation_window().length());
}

Equation prefix_modify(const Equation& eq, Index n1, std::span<const SeqExpr> replacement) {
  if (replacement.size() != eq.size()) {
    throw std::invalid_argument("prefix_modify: expected " + std::to_string(eq.size()) + " coefficients, got " +
                                std::to_string(replacement.size()));
  }
  if (n1 < 0) throw std::invalid_argument("prefix_modify: n1 must be >= 0");
  if (n1 == 0) return eq;
  std::vector<Term> terms;
  for (std::size_t l = 0; l < eq.size(); ++l) {
    terms.push_back({SeqExpr::splice(n1, replacement[l], eq.term(l).coeff), eq.term(l).delay});
  }
  const Index window = std::max(eq.validation_window().length(), min_validation_window(eq.T()) + n1);
  return validate(std::move(terms), eq.forcing(), window);
}

Equation with_delays(const Equation& eq, std::span<const DelaySpec> delays) {
  if (delays.size() != eq.size()) throw std::invalid_argument("with_delays: arity mismatch");
  std::vector<Term> terms;
  Index max_lag = 0;
  for (std::size_t l = 0; l < eq.size(); ++l) {
    terms.push_back({eq.term(l).coeff, delays[l]});
    max_lag = std::max(max_lag, delays[l].max_lag());
  }
  return validate(std::move(terms), eq.forcing(),
                  std::max(eq.validation_window().length(), min_validation_window(max_lag)));
}

Equation with_forcing(const Equation& eq, std::optional<SeqExpr> forcing) {
  return validate(eq.terms(), std::move(forcing), eq.validation_window().length());
}

Equation aggregate_equation(const Equation& eq, std::span<const std::size_t> indices, const DelaySpec& delay) {
  if (indices.empty()) throw std::invalid_argument("aggregate_equation: empty index set");
  SeqExpr sum = eq.term(indices.front()).coeff;
  for (std::size_t i = 1; i < indices.size(); ++i) sum = sum + eq.term(indices[i]).coeff;
  return validate({Term{sum, delay}}, std::nullopt,
                  std::max(eq.validation_window().length(), min_validation_window(delay.max_lag())));
}

InitialData::InitialData(Index n0, Index T, std::vector<double> values) : n0_(n0), values_(std::move(values)) {
  if (T < 0) throw std::invalid_argument("InitialData: T must be >= 0");
  if (static_cast<Index>(values_.size()) != T + 1) {
    throw std::invalid_argument("InitialData: history must cover [n0 - T, n0] (" + std::to_string(T + 1) +
                                " values), got " + std::to_string(values_.size()));
  }
}

InitialData InitialData::point(Index n0, Index T, double value) {
  std::vector<double> values(static_cast<std::size_t>(T + 1), 0.0);
  values.back() = value;
  return InitialData(n0, T, std::move(values));
}

double InitialData::at(Index n) const {
  if (n < first() || n > n0_) throw std::out_of_range("InitialData: no history at n=" + std::to_string(n));
  return values_[static_cast<std::size_t>(n - first())];
}

}  // namespace ddestab
