#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ddestab/equation.hpp"

namespace ddestab {

/// x(n0), x(n0 + 1), ..., x(N).
struct Trajectory {
  Index n0 = 0;
  std::vector<double> values;

  [[nodiscard]] Index last() const noexcept { return n0 + static_cast<Index>(values.size()) - 1; }
  [[nodiscard]] double at(Index n) const { return values.at(static_cast<std::size_t>(n - n0)); }
};

/// X(n, k) for n0 <= k <= n <= N, stored column by column.
class Kernel {
 public:
  Kernel(Index n0, Index N);

  [[nodiscard]] Index n0() const noexcept { return n0_; }
  [[nodiscard]] Index N() const noexcept { return n_end_; }
  /// Zero for n < k.
  [[nodiscard]] double at(Index n, Index k) const;
  /// Column k as values X(k..N, k).
  [[nodiscard]] const std::vector<double>& column(Index k) const;

 private:
  friend Kernel kernel(const Equation&, Index, Index, std::size_t);

  Index n0_;
  Index n_end_;
  std::vector<std::vector<double>> columns_;
};

inline constexpr std::size_t kDefaultKernelCap = 100'000'000;

/// Coefficients a_l(n) and arguments h_l(n) for n in [start, end], evaluated once.
class CoeffTable {
 public:
  CoeffTable(const Equation& eq, Index start, Index end);

  [[nodiscard]] std::size_t terms() const noexcept { return coeff_.size(); }
  [[nodiscard]] double a(std::size_t l, Index n) const { return coeff_[l][offset(n)]; }
  [[nodiscard]] Index h(std::size_t l, Index n) const { return arg_[l][offset(n)]; }
  [[nodiscard]] double sum(Index n) const { return sum_[offset(n)]; }
  [[nodiscard]] double abs_sum(Index n) const { return abs_sum_[offset(n)]; }
  [[nodiscard]] Index start() const noexcept { return start_; }
  [[nodiscard]] Index end() const noexcept { return end_; }

 private:
  [[nodiscard]] std::size_t offset(Index n) const { return static_cast<std::size_t>(n - start_); }

  Index start_;
  Index end_;
  std::vector<std::vector<double>> coeff_;
  std::vector<std::vector<Index>> arg_;
  std::vector<double> sum_;
  std::vector<double> abs_sum_;
};

/// Solution over [init.n0, N]; forcing taken from eq.
[[nodiscard]] Trajectory simulate(const Equation& eq, const InitialData& init, Index N);

/// X(n, k) for n in [k, N].
[[nodiscard]] std::vector<double> fundamental(const Equation& eq, Index k, Index N);
[[nodiscard]] std::vector<double> fundamental(const CoeffTable& table, Index k, Index N);

/// log|X(n, k)| for n in [k, N], immune to overflow and underflow; -inf where X vanishes.
[[nodiscard]] std::vector<double> fundamental_log_magnitude(const Equation& eq, Index k, Index N);

/// Full table; throws std::length_error above `cap` entries.
[[nodiscard]] Kernel kernel(const Equation& eq, Index n0, Index N, std::size_t cap = kDefaultKernelCap);

/// y(n) = sum_{k=n0}^{n-1} X(n, k+1) f(k), y(n0) = 0, evaluated from kernel columns.
[[nodiscard]] Trajectory cauchy_apply(const Equation& eq, const SeqExpr& f, Index n0, Index N);

/// Max deviation between simulate and the representation formula over [n0, N].
[[nodiscard]] double representation_check(const Equation& eq, const InitialData& init, const SeqExpr& f, Index N);

/// B(n) = prod_{j=k}^{n-1} (1 + sum_l |a_l(j)|) for n in [k, N].
[[nodiscard]] std::vector<double> product_bound(const Equation& eq, Index k, Index N);

/// S(n) = sum_{k=n0}^{n-1} X(n, k+1) sum_l a_l(k) for n in [n0, N].
[[nodiscard]] std::vector<double> lemma6_sum(const Equation& eq, Index n0, Index N);

/// P(n) = sum_{j=n0}^{n-1} |X(n, j+1)| for n in [n0, N].
[[nodiscard]] std::vector<double> pituk_sum(const Equation& eq, Index n0, Index N);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_kernel_csv(std::ostream& out, const Kernel& kern);
/// `n,value,bound` for n = k, k + 1, ...; both columns start at n = k.
void write_fundamental_csv(std::ostream& out, Index k, const std::vector<double>& values,
                           const std::vector<double>& bound);

}  // namespace ddestab
