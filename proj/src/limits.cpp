#include "ddestab/limits.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ddestab {

namespace {

constexpr Index kWindowLength = 10'000;
constexpr Index kMinPeriods = 10;
constexpr Index kMinGeneralLength = 1000;

bool takes_minimum(EstimateMode mode) { return mode == EstimateMode::liminf || mode == EstimateMode::inf; }

IndexWindow resolve(const Equation& eq, std::optional<IndexWindow> window, std::optional<Index> period) {
  const IndexWindow w = window.value_or(default_window(eq));
  require_valid_window(eq, w, period);
  return w;
}

std::optional<Index> with_delay_period(std::optional<Index> period, const DelaySpec& delay) {
  if (!period) return std::nullopt;
  return lcm_period(*period, delay.period());
}

}  // namespace

std::string to_string(EstimateMode mode) {
  switch (mode) {
    case EstimateMode::liminf: return "liminf";
    case EstimateMode::limsup: return "limsup";
    case EstimateMode::sup: return "sup";
    case EstimateMode::inf: return "inf";
  }
  return "liminf";
}

IndexWindow default_window(const Equation& eq) {
  const Index start = 10 * std::max<Index>(eq.T(), 1);
  return {start, start + kWindowLength};
}

void require_valid_window(const Equation& eq, IndexWindow window, std::optional<Index> period) {
  if (window.end < window.start) throw std::invalid_argument("window end before start");
  if (window.start < eq.T()) {
    throw std::invalid_argument("window start " + std::to_string(window.start) + " precedes T = " +
                                std::to_string(eq.T()));
  }
  const Index needed = period ? kMinPeriods * *period : kMinGeneralLength;
  if (window.length() < needed) {
    throw std::invalid_argument("window length " + std::to_string(window.length()) + " below the required " +
                                std::to_string(needed));
  }
}

AsymptoticEstimate scan_extremum(IndexWindow window, std::optional<Index> period, EstimateMode mode,
                                 const std::function<double(Index)>& value) {
  const bool minimum = takes_minimum(mode);
  const Index end = period ? window.start + *period - 1 : window.end;
  double best = minimum ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  for (Index n = window.start; n <= end; ++n) {
    const double v = value(n);
    best = minimum ? std::min(best, v) : std::max(best, v);
  }
  return AsymptoticEstimate{best, period.has_value(), window, mode};
}

AsymptoticEstimate liminf_sum(const Equation& eq, std::optional<IndexWindow> window) {
  const auto period = eq.combined_period();
  return scan_extremum(resolve(eq, window, period), period, EstimateMode::liminf,
                       [&eq](Index n) { return eq.coeff_sum(n); });
}

AsymptoticEstimate limsup_product(const Equation& eq, Index p, std::optional<IndexWindow> window) {
  if (p < 1) throw std::invalid_argument("limsup_product: p must be >= 1");
  const auto period = eq.combined_period();
  return scan_extremum(resolve(eq, window, period), period, EstimateMode::limsup, [&eq, p](Index n) {
    double prod = 1.0;
    for (Index j = n; j < n + p; ++j) prod *= 1.0 - eq.coeff_sum(j);
    return prod;
  });
}

AsymptoticEstimate liminf_window_max(const Equation& eq, Index p, std::optional<IndexWindow> window) {
  if (p < 1) throw std::invalid_argument("liminf_window_max: p must be >= 1");
  const auto period = eq.combined_period();
  return scan_extremum(resolve(eq, window, period), period, EstimateMode::liminf, [&eq, p](Index n) {
    double best = -std::numeric_limits<double>::infinity();
    for (Index k = n; k < n + p; ++k) best = std::max(best, eq.coeff_sum(k));
    return best;
  });
}

AsymptoticEstimate delay_window_sum(const Equation& eq, std::size_t l, SumUpper upper,
                                    std::optional<IndexWindow> window) {
  if (l >= eq.size()) throw std::out_of_range("delay_window_sum: term index out of range");
  const std::size_t terms[] = {l};
  return delayed_sum(eq, terms, eq.term(l).delay, upper, window);
}

AsymptoticEstimate delayed_sum(const Equation& eq, std::span<const std::size_t> terms, const DelaySpec& lower,
                               SumUpper upper, std::optional<IndexWindow> window) {
  if (terms.empty()) throw std::invalid_argument("delayed_sum: empty term set");
  for (std::size_t l : terms) {
    if (l >= eq.size()) throw std::out_of_range("delayed_sum: term index out of range");
  }
  const auto period = with_delay_period(eq.combined_period(), lower);
  const IndexWindow w = resolve(eq, window, period);
  if (w.start < lower.max_lag()) throw std::invalid_argument("delayed_sum: window starts before the delay reach");
  const Index extra = upper == SumUpper::to_n ? 1 : 0;
  return scan_extremum(w, period, EstimateMode::sup, [&](Index n) {
    double s = 0.0;
    for (Index k = lower.argument(n); k < n + extra; ++k) {
      for (std::size_t l : terms) s += eq.coeff(l, k);
    }
    return s;
  });
}

}  // namespace ddestab
