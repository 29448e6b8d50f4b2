#include "ddestab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ddestab {

namespace {

std::size_t idx(Index n, Index base) { return static_cast<std::size_t>(n - base); }

// Rescale thresholds for the log-magnitude recurrence.
constexpr int kRescaleHigh = 300;
constexpr int kRescaleLow = -300;

// out[n - n0] += w(k) * X(n, k+1) (or |X|) for every k in [n0, N-1] and n in [k+1, N].
template <class Weight>
std::vector<double> accumulate_columns(const Equation& eq, Index n0, Index N, Weight weight, bool magnitude) {
  if (N < n0) throw std::invalid_argument("horizon N must be >= n0");
  std::vector<double> out(idx(N, n0) + 1, 0.0);
  if (N == n0) return out;
  const CoeffTable table(eq, n0, N - 1);
  for (Index k = n0; k < N; ++k) {
    const double w = weight(table, k);
    if (w == 0.0) continue;
    const auto col = fundamental(table, k + 1, N);
    for (Index n = k + 1; n <= N; ++n) {
      const double x = col[idx(n, k + 1)];
      out[idx(n, n0)] += w * (magnitude ? std::fabs(x) : x);
    }
  }
  return out;
}

}  // namespace

Kernel::Kernel(Index n0, Index N) : n0_(n0), n_end_(N) {}

double Kernel::at(Index n, Index k) const {
  if (k < n0_ || k > n_end_ || n > n_end_) {
    throw std::out_of_range("Kernel::at: (" + std::to_string(n) + ", " + std::to_string(k) + ") outside table");
  }
  if (n < k) return 0.0;
  return columns_[idx(k, n0_)][idx(n, k)];
}

const std::vector<double>& Kernel::column(Index k) const {
  if (k < n0_ || k > n_end_) throw std::out_of_range("Kernel::column: k outside table");
  return columns_[idx(k, n0_)];
}

CoeffTable::CoeffTable(const Equation& eq, Index start, Index end) : start_(start), end_(end) {
  const std::size_t len = end >= start ? idx(end, start) + 1 : 0;
  coeff_.assign(eq.size(), std::vector<double>(len));
  arg_.assign(eq.size(), std::vector<Index>(len));
  sum_.assign(len, 0.0);
  abs_sum_.assign(len, 0.0);
  for (std::size_t l = 0; l < eq.size(); ++l) {
    for (std::size_t i = 0; i < len; ++i) {
      const Index n = start + static_cast<Index>(i);
      const double a = eq.coeff(l, n);
      coeff_[l][i] = a;
      arg_[l][i] = eq.argument(l, n);
      sum_[i] += a;
      abs_sum_[i] += std::fabs(a);
    }
  }
}

Trajectory simulate(const Equation& eq, const InitialData& init, Index N) {
  const Index n0 = init.n0();
  if (N < n0) throw std::invalid_argument("simulate: horizon " + std::to_string(N) + " before n0 " + std::to_string(n0));
  if (init.first() > n0 - eq.T()) throw std::invalid_argument("simulate: history shorter than T");
  const Index first = n0 - eq.T();
  std::vector<double> x(idx(N, first) + 1, 0.0);
  for (Index j = first; j <= n0; ++j) x[idx(j, first)] = init.at(j);
  const CoeffTable table(eq, n0, N - 1);
  for (Index n = n0; n < N; ++n) {
    double s = 0.0;
    for (std::size_t l = 0; l < table.terms(); ++l) s += table.a(l, n) * x[idx(table.h(l, n), first)];
    x[idx(n + 1, first)] = x[idx(n, first)] - s + eq.forcing_at(n);
  }
  Trajectory traj{n0, {}};
  traj.values.assign(x.begin() + static_cast<std::ptrdiff_t>(idx(n0, first)), x.end());
  return traj;
}

std::vector<double> fundamental(const CoeffTable& table, Index k, Index N) {
  if (N < k) throw std::invalid_argument("fundamental: N must be >= k");
  std::vector<double> col(idx(N, k) + 1, 0.0);
  col[0] = 1.0;
  for (Index n = k; n < N; ++n) {
    double s = 0.0;
    for (std::size_t l = 0; l < table.terms(); ++l) {
      const Index h = table.h(l, n);
      if (h >= k) s += table.a(l, n) * col[idx(h, k)];
    }
    col[idx(n + 1, k)] = col[idx(n, k)] - s;
  }
  return col;
}

std::vector<double> fundamental(const Equation& eq, Index k, Index N) {
  if (N < k) throw std::invalid_argument("fundamental: N must be >= k");
  return fundamental(CoeffTable(eq, k, N - 1), k, N);
}

std::vector<double> fundamental_log_magnitude(const Equation& eq, Index k, Index N) {
  if (N < k) throw std::invalid_argument("fundamental_log_magnitude: N must be >= k");
  const CoeffTable table(eq, k, N - 1);
  const Index T = eq.T();
  std::vector<double> v(idx(N, k) + 1, 0.0);
  std::vector<double> out(v.size(), -std::numeric_limits<double>::infinity());
  double offset = 0.0;
  v[0] = 1.0;
  out[0] = 0.0;
  for (Index n = k; n < N; ++n) {
    double s = 0.0;
    for (std::size_t l = 0; l < table.terms(); ++l) {
      const Index h = table.h(l, n);
      if (h >= k) s += table.a(l, n) * v[idx(h, k)];
    }
    v[idx(n + 1, k)] = v[idx(n, k)] - s;
    const double cur = v[idx(n + 1, k)];
    if (cur != 0.0) out[idx(n + 1, k)] = std::log(std::fabs(cur)) + offset;

    // Only the trailing T+1 values are read again.
    const Index lo = std::max(k, n + 1 - T);
    double peak = 0.0;
    for (Index j = lo; j <= n + 1; ++j) peak = std::max(peak, std::fabs(v[idx(j, k)]));
    if (peak == 0.0) break;
    const int e = std::ilogb(peak);
    if (e > kRescaleHigh || e < kRescaleLow) {
      for (Index j = lo; j <= n + 1; ++j) v[idx(j, k)] = std::ldexp(v[idx(j, k)], -e);
      offset += e * std::log(2.0);
    }
  }
  return out;
}

Kernel kernel(const Equation& eq, Index n0, Index N, std::size_t cap) {
  if (N < n0) throw std::invalid_argument("kernel: N must be >= n0");
  const auto width = static_cast<double>(N - n0 + 1);
  const double entries = width * (width + 1.0) / 2.0;
  if (entries > static_cast<double>(cap)) {
    throw std::length_error("kernel: " + std::to_string(static_cast<long long>(entries)) +
                            " entries exceed the cap of " + std::to_string(cap) +
                            "; use streaming column mode (one fundamental column at a time)");
  }
  Kernel kern(n0, N);
  const CoeffTable table(eq, n0, N - 1);
  kern.columns_.reserve(idx(N, n0) + 1);
  for (Index k = n0; k <= N; ++k) kern.columns_.push_back(fundamental(table, k, N));
  return kern;
}

Trajectory cauchy_apply(const Equation& eq, const SeqExpr& f, Index n0, Index N) {
  auto y = accumulate_columns(eq, n0, N, [&f](const CoeffTable&, Index k) { return f.eval(k); }, false);
  return Trajectory{n0, std::move(y)};
}

double representation_check(const Equation& eq, const InitialData& init, const SeqExpr& f, Index N) {
  const Index n0 = init.n0();
  const Trajectory sim = simulate(with_forcing(eq, f), init, N);
  // Prehistory enters only through arguments that fall before n0.
  auto weight = [&](const CoeffTable& table, Index k) {
    double g = f.eval(k);
    for (std::size_t l = 0; l < table.terms(); ++l) {
      const Index h = table.h(l, k);
      if (h < n0) g -= table.a(l, k) * init.at(h);
    }
    return g;
  };
  auto rep = accumulate_columns(eq, n0, N, weight, false);
  const auto head = fundamental(eq, n0, N);
  double worst = 0.0;
  for (Index n = n0; n <= N; ++n) {
    const double x = head[idx(n, n0)] * init.at(n0) + rep[idx(n, n0)];
    worst = std::max(worst, std::fabs(x - sim.at(n)));
  }
  return worst;
}

std::vector<double> product_bound(const Equation& eq, Index k, Index N) {
  if (N < k) throw std::invalid_argument("product_bound: N must be >= k");
  const CoeffTable table(eq, k, N - 1);
  std::vector<double> b(idx(N, k) + 1, 1.0);
  for (Index n = k; n < N; ++n) b[idx(n + 1, k)] = b[idx(n, k)] * (1.0 + table.abs_sum(n));
  return b;
}

std::vector<double> lemma6_sum(const Equation& eq, Index n0, Index N) {
  return accumulate_columns(eq, n0, N, [](const CoeffTable& t, Index k) { return t.sum(k); }, false);
}

std::vector<double> pituk_sum(const Equation& eq, Index n0, Index N) {
  return accumulate_columns(eq, n0, N, [](const CoeffTable&, Index) { return 1.0; }, true);
}

namespace {

void put_double(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "n,value\n";
  for (std::size_t i = 0; i < traj.values.size(); ++i) {
    out << traj.n0 + static_cast<Index>(i) << ',';
    put_double(out, traj.values[i]);
    out << '\n';
  }
}

void write_kernel_csv(std::ostream& out, const Kernel& kern) {
  out << "n,k,value\n";
  for (Index k = kern.n0(); k <= kern.N(); ++k) {
    const auto& col = kern.column(k);
    for (std::size_t i = 0; i < col.size(); ++i) {
      out << k + static_cast<Index>(i) << ',' << k << ',';
      put_double(out, col[i]);
      out << '\n';
    }
  }
}

void write_fundamental_csv(std::ostream& out, Index k, const std::vector<double>& values,
                           const std::vector<double>& bound) {
  if (values.size() != bound.size()) throw std::invalid_argument("write_fundamental_csv: column lengths differ");
  out << "n,value,bound\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << k + static_cast<Index>(i) << ',';
    put_double(out, values[i]);
    out << ',';
    put_double(out, bound[i]);
    out << '\n';
  }
}

}  // namespace ddestab
