#pragma once

// Tail quantities of coefficient aggregates. When every contributing sequence
// is constant or periodic the value is exact (one period of the tail);
// otherwise it is the extremum over a finite window and exact = false.

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "ddestab/equation.hpp"

namespace ddestab {

enum class EstimateMode { liminf, limsup, sup, inf };

[[nodiscard]] std::string to_string(EstimateMode mode);

struct AsymptoticEstimate {
  double value = 0.0;
  bool exact = false;
  IndexWindow window;
  EstimateMode mode = EstimateMode::liminf;
};

/// Upper summation limit of a delayed window sum.
enum class SumUpper { to_n_minus_1, to_n };

/// [10 max(T,1), 10 max(T,1) + 10^4].
[[nodiscard]] IndexWindow default_window(const Equation& eq);

/// Throws std::invalid_argument unless start >= T and the window spans at
/// least 10 periods (exact inputs) or 1000 indices (otherwise).
void require_valid_window(const Equation& eq, IndexWindow window, std::optional<Index> period);

/// Extremum of value(n) over the window; a single period is scanned when
/// `period` is set. liminf/inf take the minimum, limsup/sup the maximum.
[[nodiscard]] AsymptoticEstimate scan_extremum(IndexWindow window, std::optional<Index> period, EstimateMode mode,
                                               const std::function<double(Index)>& value);

/// liminf_n sum_l a_l(n).
[[nodiscard]] AsymptoticEstimate liminf_sum(const Equation& eq, std::optional<IndexWindow> window = std::nullopt);

/// limsup_n of prod_{j=n}^{n+p-1} (1 - sum_l a_l(j)).
[[nodiscard]] AsymptoticEstimate limsup_product(const Equation& eq, Index p,
                                                std::optional<IndexWindow> window = std::nullopt);

/// liminf_n of max_{n <= k <= n+p-1} sum_l a_l(k).
[[nodiscard]] AsymptoticEstimate liminf_window_max(const Equation& eq, Index p,
                                                   std::optional<IndexWindow> window = std::nullopt);

/// sup_n of sum_{k=h_l(n)}^{n-1 or n} a_l(k).
[[nodiscard]] AsymptoticEstimate delay_window_sum(const Equation& eq, std::size_t l, SumUpper upper,
                                                  std::optional<IndexWindow> window = std::nullopt);

/// sup_n of sum_{k=n-lower(n)}^{n-1 or n} sum_{l in terms} a_l(k).
[[nodiscard]] AsymptoticEstimate delayed_sum(const Equation& eq, std::span<const std::size_t> terms,
                                             const DelaySpec& lower, SumUpper upper,
                                             std::optional<IndexWindow> window = std::nullopt);

}  // namespace ddestab
