#pragma once

// Ground truth independent of the criteria: the companion spectral radius of
// autonomous equations and empirical decay rates of kernel columns.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ddestab/equation.hpp"

namespace ddestab {

struct SpectralReport {
  double radius = 0.0;
  /// Bound on |radius - true spectral radius|.
  double error_bound = 0.0;
  /// T + 1.
  Index dimension = 1;
};

/// Spectral radius of the companion matrix of x(n+1) = x(n) - sum a_l x(n - tau_l).
/// Closed-form roots up to dimension 3, power iteration above.
[[nodiscard]] SpectralReport companion_radius(std::span<const std::pair<double, Index>> terms);
/// Throws std::invalid_argument unless eq.is_autonomous().
[[nodiscard]] SpectralReport companion_radius(const Equation& eq);

/// Geometric fit |c_i| ~ L mu^(i - lo) over i in [lo, hi] (offsets into the column).
struct DecayFit {
  double mu_hat = 0.0;
  /// |c_i| <= L_hat mu_hat^(i - lo) on the window.
  double L_hat = 0.0;
  IndexWindow window;
  /// Largest |log|c_i| - fitted line|.
  double residual = 0.0;
  /// No nonzero entry after the lead-in; mu_hat = 0 by convention.
  bool degenerate = false;
  /// Log-slope falls by more than 0.1 between the two halves of the window.
  bool super_exponential = false;

  [[nodiscard]] bool decays() const noexcept { return mu_hat < 1.0; }
};

/// Requires column.size() >= skip + 50.
[[nodiscard]] DecayFit fit_decay(std::span<const double> column, Index skip);
/// Same fit on log|c_i| (as produced by fundamental_log_magnitude); -inf marks zeros.
[[nodiscard]] DecayFit fit_decay_log(std::span<const double> log_column, Index skip);
/// max(5 T, 20).
[[nodiscard]] Index default_skip(const Equation& eq);

/// Decay class of X(n, 0) agrees for eq and prefix_modify(eq, n1, replacement)
/// on [n1 + 5 T, N].
[[nodiscard]] bool tail_equivalence_test(const Equation& eq, Index n1, std::span<const SeqExpr> replacement, Index N);

struct RandomEquationOptions {
  std::size_t m_max = 3;
  Index T_max = 5;
  /// |a_l(n)| <= K_max.
  double K_max = 1.0;
  /// Constant coefficients only.
  bool autonomous = false;
  /// Probability that a coefficient is negative.
  double negative_share = 0.25;
};

/// Reproducible from the seed on every platform.
[[nodiscard]] Equation random_equation(std::uint64_t seed, const RandomEquationOptions& opts = {});

}  // namespace ddestab
