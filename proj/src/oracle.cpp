#include "ddestab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>

#include "ddestab/simulator.hpp"

namespace ddestab {

namespace {

using cplx = std::complex<long double>;

constexpr int kRestarts = 64;
constexpr int kIterations = 10'000;
constexpr long double kTolerance = 1e-10L;

/// c_j with x(n+1) = sum_j c_j x(n-j), j = 0..T.
std::vector<long double> recurrence(std::span<const std::pair<double, Index>> terms) {
  Index T = 0;
  for (const auto& [a, lag] : terms) {
    if (lag < 0) throw std::invalid_argument("companion_radius: negative lag");
    T = std::max(T, lag);
  }
  std::vector<long double> c(static_cast<std::size_t>(T + 1), 0.0L);
  c[0] = 1.0L;
  for (const auto& [a, lag] : terms) c[static_cast<std::size_t>(lag)] -= a;
  return c;
}

/// Monic characteristic polynomial lambda^(T+1) - sum_j c_j lambda^(T-j) and its derivatives at z.
std::vector<cplx> poly_derivs(const std::vector<long double>& c, cplx z) {
  // Coefficients from the leading term down.
  std::vector<long double> p{1.0L};
  for (long double cj : c) p.push_back(-cj);
  std::vector<cplx> d(4, cplx{0});
  for (long double coef : p) {
    d[3] = d[3] * z + d[2];
    d[2] = d[2] * z + d[1];
    d[1] = d[1] * z + d[0];
    d[0] = d[0] * z + coef;
  }
  d[2] *= 2.0L;
  d[3] *= 6.0L;
  return d;
}

/// Newton polish and a multiplicity-aware error estimate.
std::pair<cplx, long double> polish(const std::vector<long double>& c, cplx z) {
  for (int it = 0; it < 3; ++it) {
    const auto d = poly_derivs(c, z);
    if (std::abs(d[1]) < 1e-12L) break;
    const cplx step = d[0] / d[1];
    if (!std::isfinite(std::abs(step))) break;
    z -= step;
  }
  const auto d = poly_derivs(c, z);
  long double err = std::numeric_limits<long double>::infinity();
  long double factorial = 1.0L;
  for (int m = 1; m <= 3; ++m) {
    factorial *= m;
    if (std::abs(d[static_cast<std::size_t>(m)]) > 0.0L) {
      err = std::min(err, std::pow(std::abs(d[0]) * factorial / std::abs(d[static_cast<std::size_t>(m)]), 1.0L / m));
    }
  }
  return {z, err};
}

std::vector<cplx> closed_form_roots(const std::vector<long double>& c) {
  if (c.size() == 1) return {cplx{c[0]}};
  if (c.size() == 2) {
    const cplx disc = std::sqrt(cplx{c[0] * c[0] + 4.0L * c[1]});
    return {(c[0] + disc) / 2.0L, (c[0] - disc) / 2.0L};
  }
  // lambda^3 + b lambda^2 + cc lambda + d with lambda = t - b/3.
  const long double b = -c[0], cc = -c[1], d = -c[2];
  const long double p = cc - b * b / 3.0L;
  const long double q = 2.0L * b * b * b / 27.0L - b * cc / 3.0L + d;
  const cplx s = std::sqrt(cplx{q * q / 4.0L + p * p * p / 27.0L});
  cplx w = -q / 2.0L + s;
  if (std::abs(-q / 2.0L - s) > std::abs(w)) w = -q / 2.0L - s;
  const cplx omega{-0.5L, std::sqrt(3.0L) / 2.0L};
  std::vector<cplx> roots;
  if (std::abs(w) == 0.0L) return {cplx{-b / 3.0L}, cplx{-b / 3.0L}, cplx{-b / 3.0L}};
  cplx u = std::pow(w, 1.0L / 3.0L);
  for (int k = 0; k < 3; ++k) {
    roots.push_back(u - p / (3.0L * u) - b / 3.0L);
    u *= omega;
  }
  return roots;
}

struct Estimate {
  long double radius = 0.0L;
  long double residual = std::numeric_limits<long double>::infinity();
};

struct KrylovFit {
  std::vector<cplx> roots;
  long double residual = std::numeric_limits<long double>::infinity();
};

void apply(const std::vector<long double>& c, const std::vector<long double>& x, std::vector<long double>& y) {
  long double head = 0.0L;
  for (std::size_t j = 0; j < c.size(); ++j) head += c[j] * x[j];
  for (std::size_t j = c.size() - 1; j > 0; --j) y[j] = x[j - 1];
  y[0] = head;
}

long double norm(const std::vector<long double>& x) {
  long double s = 0.0L;
  for (long double v : x) s += v * v;
  return std::sqrt(s);
}

long double dot(const std::vector<long double>& x, const std::vector<long double>& y) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/// Roots of z^k - sum_i p_i z^(k-1-i) by Durand-Kerner.
std::vector<cplx> small_roots(const std::vector<long double>& p) {
  const std::size_t k = p.size();
  auto eval = [&](cplx z) {
    cplx v{1.0L};
    for (long double pi : p) v = v * z - pi;
    return v;
  };
  long double scale = 1.0L;
  for (long double pi : p) scale = std::max(scale, 1.0L + std::fabs(pi));
  std::vector<cplx> z(k);
  const cplx seed{0.4L, 0.9L};
  for (std::size_t i = 0; i < k; ++i) z[i] = scale * std::pow(seed, static_cast<long double>(i));
  for (int it = 0; it < 500; ++it) {
    long double moved = 0.0L;
    for (std::size_t i = 0; i < k; ++i) {
      cplx denom{1.0L};
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      if (std::abs(denom) == 0.0L) denom = cplx{1e-30L};
      const cplx step = eval(z[i]) / denom;
      z[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-18L * scale) break;
  }
  return z;
}

/// Least-squares solve of the k x k normal equations; false when singular.
bool solve(std::vector<std::vector<long double>> g, std::vector<long double>& rhs) {
  const std::size_t k = rhs.size();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::fabs(g[r][col]) > std::fabs(g[pivot][col])) pivot = r;
    }
    if (std::fabs(g[pivot][col]) < 1e-24L * std::max(std::fabs(g[0][0]), 1e-300L)) return false;
    std::swap(g[pivot], g[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const long double f = g[r][col] / g[col][col];
      for (std::size_t c = col; c < k; ++c) g[r][c] -= f * g[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t i = 0; i < k; ++i) rhs[i] /= g[i][i];
  return true;
}

/// Fits iterate k as a combination of iterates 0..k-1; roots of the fitted recurrence.
KrylovFit krylov_fit(const std::vector<std::vector<long double>>& iterates, std::size_t k) {
  const auto& target = iterates[k];
  std::vector<std::vector<long double>> g(k, std::vector<long double>(k));
  std::vector<long double> rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) g[i][j] = dot(iterates[k - 1 - i], iterates[k - 1 - j]);
    rhs[i] = dot(iterates[k - 1 - i], target);
  }
  if (!solve(g, rhs)) return {};
  std::vector<long double> r = target;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t d = 0; d < r.size(); ++d) r[d] -= rhs[i] * iterates[k - 1 - i][d];
  }
  return {small_roots(rhs), norm(r) / std::max(norm(target), std::numeric_limits<long double>::min())};
}

constexpr std::size_t kMaxKrylov = 4;

/// Dominant modulus from one start. A Krylov fit of up to four modes is used when it
/// reproduces the next iterate; otherwise the mean log-growth of the norm.
Estimate power_iteration(const std::vector<long double>& c, std::mt19937_64& rng) {
  const std::size_t dim = c.size();
  std::vector<long double> u(dim), v(dim);
  for (auto& x : u) x = static_cast<long double>(rng() >> 11) * 0x1.0p-53L - 0.5L;
  const long double n0 = norm(u);
  for (auto& x : u) x /= n0;
  long double log_growth[2] = {0.0L, 0.0L};
  for (int it = 0; it < 2 * kIterations; ++it) {
    apply(c, u, v);
    const long double nv = norm(v);
    if (nv == 0.0L) return {0.0L, 0.0L};
    if (it >= kIterations) log_growth[(it - kIterations) * 2 / kIterations] += std::log(nv);
    for (std::size_t i = 0; i < dim; ++i) u[i] = v[i] / nv;
  }
  const long double half = kIterations / 2.0L;
  const long double first = std::exp(log_growth[0] / half);
  const long double second = std::exp(log_growth[1] / half);
  const Estimate growth{std::exp((log_growth[0] + log_growth[1]) / kIterations), std::fabs(first - second) + 1e-6L};

  std::vector<std::vector<long double>> iterates{u};
  for (std::size_t i = 0; i < std::min(kMaxKrylov, dim); ++i) {
    iterates.emplace_back(dim);
    apply(c, iterates[i], iterates[i + 1]);
    if (norm(iterates.back()) == 0.0L) return {0.0L, 0.0L};
  }
  for (std::size_t k = 1; k < iterates.size(); ++k) {
    const auto fit = krylov_fit(iterates, k);
    if (fit.residual >= kTolerance) continue;
    // Keep fitted modes that are roots of the characteristic polynomial.
    long double radius = -1.0L;
    long double err = 0.0L;
    for (const cplx& z0 : fit.roots) {
      const auto [z, e] = polish(c, z0);
      if (e < 1e-8L && std::abs(z) > radius) {
        radius = std::abs(z);
        err = e;
      }
    }
    if (radius >= 0.0L && std::fabs(radius - growth.radius) <= 10.0L * growth.residual + 1e-4L) {
      return {radius, std::max(err, fit.residual)};
    }
  }
  return growth;
}

double log_or_inf(double x) { return x == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(x)); }

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

Line least_squares(std::span<const double> logs, Index from, Index to, Index origin) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (Index i = from; i <= to; ++i) {
    const double y = logs[static_cast<std::size_t>(i)];
    if (!std::isfinite(y)) continue;
    const double x = static_cast<double>(i - origin);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  Line line;
  line.points = n;
  if (n == 0) return line;
  const double nn = static_cast<double>(n);
  const double denom = nn * sxx - sx * sx;
  line.slope = n >= 2 && denom != 0.0 ? (nn * sxy - sx * sy) / denom : 0.0;
  line.intercept = (sy - line.slope * sx) / nn;
  return line;
}

/// Uniform on [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

}  // namespace

SpectralReport companion_radius(std::span<const std::pair<double, Index>> terms) {
  const auto c = recurrence(terms);
  SpectralReport report;
  report.dimension = static_cast<Index>(c.size());
  if (c.size() <= 3) {
    long double radius = 0.0L;
    long double err = 0.0L;
    for (const cplx& r : closed_form_roots(c)) {
      const auto [z, e] = polish(c, r);
      if (std::abs(z) >= radius) {
        radius = std::abs(z);
        err = std::max(err, e);
      }
    }
    report.radius = static_cast<double>(radius);
    report.error_bound = std::max(static_cast<double>(err), 1e-15);
    return report;
  }
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  Estimate best;
  bool certified = false;
  for (int r = 0; r < kRestarts; ++r) {
    const Estimate e = power_iteration(c, rng);
    if (e.residual < kTolerance) {
      best = e;
      certified = true;
      break;
    }
    if (r == 0 || e.radius > best.radius) best = e;
  }
  report.radius = static_cast<double>(best.radius);
  const long double err = certified ? best.residual * std::max(best.radius, 1.0L) : best.residual;
  report.error_bound = std::max(static_cast<double>(err), 1e-15);
  return report;
}

SpectralReport companion_radius(const Equation& eq) {
  if (!eq.is_autonomous()) throw std::invalid_argument("companion_radius: equation is not autonomous");
  std::vector<std::pair<double, Index>> terms;
  for (std::size_t l = 0; l < eq.size(); ++l) terms.emplace_back(eq.coeff(l, 0), eq.term(l).delay.max_lag());
  return companion_radius(terms);
}

DecayFit fit_decay_log(std::span<const double> log_column, Index skip) {
  if (skip < 0) throw std::invalid_argument("fit_decay: negative skip");
  if (static_cast<Index>(log_column.size()) < skip + 50) {
    throw std::invalid_argument("fit_decay: column needs at least skip + 50 entries");
  }
  const Index lo = skip;
  const Index hi = static_cast<Index>(log_column.size()) - 1;
  DecayFit fit;
  fit.window = {lo, hi};
  const Line line = least_squares(log_column, lo, hi, lo);
  if (line.points == 0) {
    fit.degenerate = true;
    return fit;
  }
  fit.mu_hat = std::exp(line.slope);
  double worst_above = -std::numeric_limits<double>::infinity();
  for (Index i = lo; i <= hi; ++i) {
    const double y = log_column[static_cast<std::size_t>(i)];
    if (!std::isfinite(y)) continue;
    const double r = y - (line.intercept + line.slope * static_cast<double>(i - lo));
    worst_above = std::max(worst_above, r);
    fit.residual = std::max(fit.residual, std::fabs(r));
  }
  fit.L_hat = std::exp(line.intercept + worst_above);
  const Index mid = lo + (hi - lo) / 2;
  const Line first = least_squares(log_column, lo, mid, lo);
  const Line second = least_squares(log_column, mid + 1, hi, lo);
  fit.super_exponential = first.points >= 2 && second.points >= 2 && second.slope < first.slope - 0.1;
  return fit;
}

DecayFit fit_decay(std::span<const double> column, Index skip) {
  std::vector<double> logs(column.size());
  std::transform(column.begin(), column.end(), logs.begin(), log_or_inf);
  return fit_decay_log(logs, skip);
}

Index default_skip(const Equation& eq) { return std::max<Index>(5 * eq.T(), 20); }

bool tail_equivalence_test(const Equation& eq, Index n1, std::span<const SeqExpr> replacement, Index N) {
  const Equation modified = prefix_modify(eq, n1, replacement);
  const Index lo = n1 + 5 * eq.T();
  const auto original_fit = fit_decay_log(fundamental_log_magnitude(eq, 0, N), lo);
  const auto modified_fit = fit_decay_log(fundamental_log_magnitude(modified, 0, N), lo);
  return original_fit.decays() == modified_fit.decays();
}

Equation random_equation(std::uint64_t seed, const RandomEquationOptions& opts) {
  if (opts.m_max < 1 || opts.T_max < 0 || !(opts.K_max > 0.0)) {
    throw std::invalid_argument("random_equation: bounds must be positive");
  }
  std::mt19937_64 rng(seed);
  auto coefficient = [&] {
    const double magnitude = unit(rng) * opts.K_max;
    return unit(rng) < opts.negative_share ? -magnitude : magnitude;
  };
  const auto lag_count = static_cast<std::uint64_t>(opts.T_max + 1);
  const std::size_t m = 1 + static_cast<std::size_t>(below(rng, opts.m_max));
  std::vector<Term> terms;
  for (std::size_t l = 0; l < m; ++l) {
    SeqExpr coeff = SeqExpr::constant(0.0);
    if (opts.autonomous || unit(rng) < 0.5) {
      coeff = SeqExpr::constant(coefficient());
    } else {
      std::vector<double> table(2 + below(rng, 3));
      for (auto& v : table) v = coefficient();
      coeff = SeqExpr::periodic(table);
    }
    DelaySpec delay = DelaySpec::constant(static_cast<Index>(below(rng, lag_count)));
    if (!opts.autonomous && unit(rng) < 0.2) {
      std::vector<Index> lags(2);
      for (auto& v : lags) v = static_cast<Index>(below(rng, lag_count));
      delay = DelaySpec::periodic(std::move(lags));
    }
    terms.push_back(Term{std::move(coeff), std::move(delay)});
  }
  return validate(std::move(terms));
}

}  // namespace ddestab
