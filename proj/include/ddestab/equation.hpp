#pragma once

// x(n+1) - x(n) = -sum_l a_l(n) x(h_l(n)) + f(n),  h_l(n) = n - d_l(n).

#include <optional>
#include <span>
#include <vector>

#include "ddestab/seqexpr.hpp"

namespace ddestab {

/// Inclusive index range [start, end].
struct IndexWindow {
  Index start = 0;
  Index end = 0;

  [[nodiscard]] Index length() const noexcept { return end - start + 1; }
  friend bool operator==(const IndexWindow&, const IndexWindow&) = default;
};

struct Term {
  SeqExpr coeff;
  DelaySpec delay;
};

class Equation {
 public:
  [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
  [[nodiscard]] const Term& term(std::size_t l) const { return terms_.at(l); }
  [[nodiscard]] const SeqClass& coeff_class(std::size_t l) const { return classes_.at(l); }

  /// Coefficient bound sup_n max_l |a_l(n)| on the validation window.
  [[nodiscard]] double K() const noexcept { return k_bound_; }
  /// Largest lag over all delay tables.
  [[nodiscard]] Index T() const noexcept { return max_lag_; }
  [[nodiscard]] const std::optional<SeqExpr>& forcing() const noexcept { return forcing_; }
  [[nodiscard]] IndexWindow validation_window() const noexcept { return window_; }
  /// K is only certified on the validation window unless every coefficient
  /// is constant or periodic.
  [[nodiscard]] bool k_window_certified() const noexcept { return !coefficients_exact(); }

  [[nodiscard]] bool coefficients_exact() const noexcept;
  /// lcm of every coefficient and delay period; empty if any coefficient is general.
  [[nodiscard]] std::optional<Index> combined_period() const;
  /// Constant coefficients and constant lags.
  [[nodiscard]] bool is_autonomous() const noexcept;

  [[nodiscard]] double coeff(std::size_t l, Index n) const { return terms_[l].coeff.eval(n); }
  [[nodiscard]] Index argument(std::size_t l, Index n) const { return terms_[l].delay.argument(n); }
  /// sum_l a_l(n)
  [[nodiscard]] double coeff_sum(Index n) const;
  /// sum_l |a_l(n)|
  [[nodiscard]] double coeff_abs_sum(Index n) const;
  [[nodiscard]] double forcing_at(Index n) const { return forcing_ ? forcing_->eval(n) : 0.0; }

 private:
  friend Equation validate(std::vector<Term> terms, std::optional<SeqExpr> forcing, Index window_len);

  std::vector<Term> terms_;
  std::vector<SeqClass> classes_;
  std::optional<SeqExpr> forcing_;
  double k_bound_ = 0.0;
  Index max_lag_ = 0;
  IndexWindow window_;
};

/// Smallest admissible validation window for a given max lag.
[[nodiscard]] Index min_validation_window(Index max_lag);

/// Builds an Equation, certifying K on [0, window_len). window_len = 0 picks
/// max(1000, 10 * (1 + T)).
[[nodiscard]] Equation validate(std::vector<Term> terms, std::optional<SeqExpr> forcing = std::nullopt,
                                Index window_len = 0);

/// Equation keeping only the listed terms, in the listed order; forcing dropped.
[[nodiscard]] Equation subset_equation(const Equation& eq, std::span<const std::size_t> indices);

/// Coefficients replaced by `replacement` on [0, n1); delays are unchanged.
[[nodiscard]] Equation prefix_modify(const Equation& eq, Index n1, std::span<const SeqExpr> replacement);

/// Same coefficients with new delays (one per term).
[[nodiscard]] Equation with_delays(const Equation& eq, std::span<const DelaySpec> delays);

[[nodiscard]] Equation with_forcing(const Equation& eq, std::optional<SeqExpr> forcing);

/// Single-term equation -(sum_{l in indices} a_l(n)) x(n - lag(n)).
[[nodiscard]] Equation aggregate_equation(const Equation& eq, std::span<const std::size_t> indices,
                                          const DelaySpec& delay);

[[nodiscard]] std::vector<std::size_t> all_indices(const Equation& eq);

/// History x(n) for n in [n0 - T, n0].
class InitialData {
 public:
  /// values[i] is x(n0 - T + i); values.size() must be T + 1.
  InitialData(Index n0, Index T, std::vector<double> values);

  /// x(n0) = value, zero prehistory.
  static InitialData point(Index n0, Index T, double value);

  [[nodiscard]] Index n0() const noexcept { return n0_; }
  [[nodiscard]] Index first() const noexcept { return n0_ - static_cast<Index>(values_.size()) + 1; }
  [[nodiscard]] double at(Index n) const;
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

 private:
  Index n0_;
  std::vector<double> values_;
};

}  // namespace ddestab
