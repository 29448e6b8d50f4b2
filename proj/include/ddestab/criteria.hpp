#pragma once

// Sufficient stability tests. A checker never claims instability: a failed
// inequality gives Inconclusive, a failed hypothesis gives NotApplicable.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ddestab/equation.hpp"
#include "ddestab/limits.hpp"

namespace ddestab {

enum class Outcome { stable, inconclusive, not_applicable };

/// What a Stable outcome asserts.
enum class Claim { exponential, asymptotic, nonoscillation };

[[nodiscard]] std::string to_string(Outcome outcome);
[[nodiscard]] std::string to_string(Claim claim);

struct Verdict {
  Outcome outcome = Outcome::not_applicable;
  std::string criterion;
  std::string citation;
  std::map<std::string, double> witnesses;
  /// Asymptotic hypotheses were checked on a finite window only.
  bool window_certified = false;
  IndexWindow window;
  Claim claim = Claim::exponential;
  std::string note;

  [[nodiscard]] bool stable() const noexcept { return outcome == Outcome::stable; }
};

struct CheckOptions {
  double eps_cmp = 1e-12;
  std::optional<IndexWindow> window;
  /// Largest window length tried for the product condition.
  Index p_max = 8;
  /// Index subsets are enumerated exhaustively up to this many terms.
  std::size_t full_subset_max_terms = 12;
  /// Kernel scan length for positivity; 0 picks max(40 T, 300).
  Index positivity_span = 0;
};

enum class PositivityMethod { numerical_scan, lemma4, autonomous_bound, corollary3_characteristic };

[[nodiscard]] std::string to_string(PositivityMethod method);

struct PositivityCertificate {
  Index n0 = 0;
  Index N = 0;
  double min_value = 0.0;
  PositivityMethod by = PositivityMethod::numerical_scan;
};

/// First nonpositive kernel entry in column-major order.
struct PositivityRefutation {
  Index n = 0;
  Index k = 0;
  double value = 0.0;
};

using PositivityResult = std::variant<PositivityCertificate, PositivityRefutation>;

/// Scans X(n, k) for n0 <= k <= n <= N. Requires N - n0 >= 5 T.
[[nodiscard]] PositivityResult positivity_scan(const Equation& eq, Index n0, Index N);

/// Tries the analytic certificates, then a scan after a 5 T lead-in.
[[nodiscard]] PositivityResult certify_positivity(const Equation& eq, const CheckOptions& opts = {});

/// k^k / (k+1)^(k+1).
[[nodiscard]] double nonoscillation_threshold(Index k);
/// 0 < a <= k^k / (k+1)^(k+1); k >= 1.
[[nodiscard]] bool check_autonomous_nonosc(double a, Index k);

/// min over (0, 1] of lambda - 1 + sum_l alpha_l lambda^(-tau_l).
struct CharacteristicMin {
  double lambda = 1.0;
  double value = 0.0;
};
[[nodiscard]] CharacteristicMin characteristic_min(std::span<const double> alpha, std::span<const Index> tau);

/// Smallest b^(1/p) over p in [1, p_max] for the window product of sum_l a_l.
struct ProductCondition {
  Index p = 1;
  AsymptoticEstimate b;
};
[[nodiscard]] ProductCondition best_product_condition(const Equation& eq, const CheckOptions& opts = {});

// Nonoscillation (Claim::nonoscillation when Stable).
[[nodiscard]] Verdict check_lemma4(const Equation& eq, const CheckOptions& opts = {});

[[nodiscard]] Verdict check_theorem1(const Equation& eq, const PositivityCertificate& cert, Index p,
                                     const CheckOptions& opts = {});
[[nodiscard]] Verdict check_corollary2(const Equation& eq, Index p, const CheckOptions& opts = {});
[[nodiscard]] Verdict check_corollary3(const Equation& eq, int part, Index p, const CheckOptions& opts = {});
/// Dominant subset I: positive subset equation, product condition on it, ratio below one.
[[nodiscard]] Verdict check_theorem2(const Equation& eq, std::span<const std::size_t> I, Index p,
                                     const CheckOptions& opts = {});
/// Comparison equation with delays g (one per element of I).
[[nodiscard]] Verdict check_corollary4(const Equation& eq, std::span<const std::size_t> I,
                                       std::span<const DelaySpec> g, const CheckOptions& opts = {});
/// Common comparison delay g for every term.
[[nodiscard]] Verdict check_corollary5(const Equation& eq, const DelaySpec& g, const CheckOptions& opts = {});
[[nodiscard]] Verdict check_corollary6(const Equation& eq, const CheckOptions& opts = {});
[[nodiscard]] Verdict check_corollary7(const Equation& eq, const CheckOptions& opts = {});
/// Two-term equation -a(n) x(g(n)) - b(n) x(h(n)); term 0 is (a, g).
[[nodiscard]] Verdict check_corollary8(const Equation& eq, int part, const CheckOptions& opts = {});
[[nodiscard]] Verdict check_corollary9(double a, Index g, double b, Index h, int part, const CheckOptions& opts = {});
/// Coefficients a_1..a_m of the lags 1..m.
[[nodiscard]] Verdict check_corollary10(std::span<const double> a, const CheckOptions& opts = {});
[[nodiscard]] std::vector<Verdict> check_classical(const Equation& eq, const CheckOptions& opts = {});

/// Left side of the comparison-delay inequality at n (the part multiplied by
/// gamma on the right is sum_{k in I} a_k(n)).
[[nodiscard]] double comparison_gap_lhs(const Equation& eq, std::span<const std::size_t> I,
                                        std::span<const DelaySpec> g, Index n);

/// Every applicable checker; Stable first, then by criterion id.
[[nodiscard]] std::vector<Verdict> run_all(const Equation& eq, const CheckOptions& opts = {});

/// Ids accepted by run_selected.
[[nodiscard]] const std::vector<std::string>& criterion_ids();
/// run_all restricted to the listed criterion ids.
[[nodiscard]] std::vector<Verdict> run_selected(const Equation& eq, std::span<const std::string> ids,
                                                const CheckOptions& opts = {});

}  // namespace ddestab
