#include "ddestab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ddestab/simulator.hpp"

namespace ddestab {

namespace {

struct Cmp {
  double eps;
  /// x < t with margin.
  [[nodiscard]] bool lt(double x, double t) const { return t - x > eps; }
  /// x <= t up to tolerance.
  [[nodiscard]] bool le(double x, double t) const { return x <= t + eps; }
  [[nodiscard]] bool pos(double x) const { return x > eps; }
};

Index default_span(const Equation& eq, const CheckOptions& opts) {
  return opts.positivity_span > 0 ? opts.positivity_span : std::max<Index>(40 * eq.T(), 300);
}

/// Window for checkers whose sums reach `reach` steps back.
IndexWindow check_window(const Equation& eq, const CheckOptions& opts, Index reach = 0) {
  if (opts.window) {
    if (opts.window->start < std::max(eq.T(), reach)) {
      throw std::invalid_argument("window start " + std::to_string(opts.window->start) +
                                  " precedes the largest delay " + std::to_string(std::max(eq.T(), reach)));
    }
    return *opts.window;
  }
  IndexWindow w = default_window(eq);
  const Index start = 10 * std::max<Index>(reach, 1);
  if (start > w.start) w = {start, start + w.length() - 1};
  return w;
}

std::optional<Index> period_with(const Equation& eq, std::span<const DelaySpec> delays) {
  auto period = eq.combined_period();
  if (!period) return std::nullopt;
  for (const auto& d : delays) period = lcm_period(*period, d.period());
  return period;
}

AsymptoticEstimate over(const Equation& eq, IndexWindow w, EstimateMode mode, const std::function<double(Index)>& fn,
                        std::span<const DelaySpec> extra_delays = {}) {
  const auto period = period_with(eq, extra_delays);
  require_valid_window(eq, w, period);
  return scan_extremum(w, period, mode, fn);
}

double sum_over(const Equation& eq, std::span<const std::size_t> I, Index n) {
  double s = 0.0;
  for (std::size_t l : I) s += eq.coeff(l, n);
  return s;
}

double abs_sum_outside(const Equation& eq, std::span<const std::size_t> I, Index n) {
  double s = 0.0;
  for (std::size_t l = 0; l < eq.size(); ++l) {
    if (std::find(I.begin(), I.end(), l) == I.end()) s += std::fabs(eq.coeff(l, n));
  }
  return s;
}

bool nonnegative(const Equation& eq, std::span<const std::size_t> I, IndexWindow w, const Cmp& cmp) {
  for (std::size_t l : I) {
    const auto lo = over(eq, w, EstimateMode::inf, [&](Index n) { return eq.coeff(l, n); });
    if (lo.value < -cmp.eps) return false;
  }
  return true;
}

bool nonnegative(const Equation& eq, IndexWindow w, const Cmp& cmp) {
  const auto all = all_indices(eq);
  return nonnegative(eq, all, w, cmp);
}

/// Lag table of min_l h_l(n) over the listed terms.
DelaySpec reach_delay(const Equation& eq, std::span<const std::size_t> I) {
  Index period = 1;
  for (std::size_t l : I) period = lcm_period(period, eq.term(l).delay.period());
  std::vector<Index> lags(static_cast<std::size_t>(period), 0);
  for (Index r = 0; r < period; ++r) {
    for (std::size_t l : I) lags[static_cast<std::size_t>(r)] = std::max(lags[static_cast<std::size_t>(r)], eq.term(l).delay.lag_at(r));
  }
  return DelaySpec::periodic(std::move(lags));
}

Verdict make_verdict(std::string id, std::string citation, Claim claim, bool exact, IndexWindow w) {
  Verdict v;
  v.criterion = std::move(id);
  v.citation = std::move(citation);
  v.claim = claim;
  v.window_certified = !exact;
  v.window = w;
  v.outcome = Outcome::inconclusive;
  return v;
}

Verdict not_applicable(Verdict v, std::string why) {
  v.outcome = Outcome::not_applicable;
  v.note = std::move(why);
  return v;
}

void decide(Verdict& v, bool holds) { v.outcome = holds ? Outcome::stable : Outcome::inconclusive; }

void append_note(Verdict& v, const std::string& text) {
  if (!v.note.empty()) v.note += "; ";
  v.note += text;
}

std::string index_set(std::span<const std::size_t> I) {
  std::ostringstream out;
  out << "terms {";
  for (std::size_t i = 0; i < I.size(); ++i) out << (i ? ", " : "") << I[i];
  out << '}';
  return out.str();
}

bool exact_inputs(const Equation& eq) { return eq.combined_period().has_value(); }

}  // namespace

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::stable: return "Stable";
    case Outcome::inconclusive: return "Inconclusive";
    case Outcome::not_applicable: return "NotApplicable";
  }
  return "NotApplicable";
}

std::string to_string(Claim claim) {
  switch (claim) {
    case Claim::exponential: return "exponential";
    case Claim::asymptotic: return "asymptotic";
    case Claim::nonoscillation: return "nonoscillation";
  }
  return "exponential";
}

std::string to_string(PositivityMethod method) {
  switch (method) {
    case PositivityMethod::numerical_scan: return "numerical_scan";
    case PositivityMethod::lemma4: return "lemma4";
    case PositivityMethod::autonomous_bound: return "autonomous_bound";
    case PositivityMethod::corollary3_characteristic: return "corollary3_characteristic";
  }
  return "numerical_scan";
}

double nonoscillation_threshold(Index k) {
  if (k < 1) throw std::invalid_argument("nonoscillation_threshold: k must be >= 1");
  const double kd = static_cast<double>(k);
  const double t = std::exp(kd * std::log(kd) - (kd + 1.0) * std::log(kd + 1.0));
#ifdef DDESTAB_MUTATE_THRESHOLDS
  return 8.0 * t;
#else
  return t;
#endif
}

bool check_autonomous_nonosc(double a, Index k) {
  if (k < 1) throw std::invalid_argument("check_autonomous_nonosc: k must be >= 1");
  return a > 0.0 && a <= nonoscillation_threshold(k) + CheckOptions{}.eps_cmp;
}

CharacteristicMin characteristic_min(std::span<const double> alpha, std::span<const Index> tau) {
  if (alpha.size() != tau.size()) throw std::invalid_argument("characteristic_min: arity mismatch");
  auto f = [&](double lambda) {
    double v = lambda - 1.0;
    for (std::size_t l = 0; l < alpha.size(); ++l) v += alpha[l] * std::pow(lambda, -static_cast<double>(tau[l]));
    return v;
  };
  // f is convex on (0, 1]; golden-section search.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 1e-6;
  double hi = 1.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > 1e-10) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    }
  }
  CharacteristicMin best{0.5 * (lo + hi), f(0.5 * (lo + hi))};
  for (double edge : {1e-6, 1.0}) {
    if (f(edge) < best.value) best = {edge, f(edge)};
  }
  return best;
}

ProductCondition best_product_condition(const Equation& eq, const CheckOptions& opts) {
  const IndexWindow w = check_window(eq, opts);
  ProductCondition best{1, limsup_product(eq, 1, w)};
  auto rate = [](const ProductCondition& pc) {
    return std::pow(std::max(pc.b.value, 0.0), 1.0 / static_cast<double>(pc.p));
  };
  for (Index p = 2; p <= opts.p_max; ++p) {
    ProductCondition cand{p, limsup_product(eq, p, w)};
    if (rate(cand) < rate(best)) best = cand;
  }
  return best;
}

PositivityResult positivity_scan(const Equation& eq, Index n0, Index N) {
  if (N - n0 < 5 * eq.T()) throw std::invalid_argument("positivity_scan: need N - n0 >= 5T");
  const CoeffTable table(eq, n0, std::max(n0, N - 1));
  double min_value = std::numeric_limits<double>::infinity();
  for (Index k = n0; k <= N; ++k) {
    const auto col = fundamental(table, k, N);
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col[i] <= 0.0) return PositivityRefutation{k + static_cast<Index>(i), k, col[i]};
      min_value = std::min(min_value, col[i]);
    }
  }
  return PositivityCertificate{n0, N, min_value, PositivityMethod::numerical_scan};
}

Verdict check_lemma4(const Equation& eq, const CheckOptions& opts) {
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  Verdict v = make_verdict("lemma4", "Lemma 4: nonoscillation test for nonnegative coefficients",
                           Claim::nonoscillation, exact_inputs(eq), w);
  if (!nonnegative(eq, w, cmp)) return not_applicable(std::move(v), "a coefficient takes negative values");
  const auto all = all_indices(eq);
  const double s1 = over(eq, w, EstimateMode::sup, [&](Index n) { return eq.coeff_sum(n); }).value;
  const double s2 = delayed_sum(eq, all, reach_delay(eq, all), SumUpper::to_n_minus_1, w).value;
  v.witnesses["sup_sum"] = s1;
  v.witnesses["delayed_sum"] = s2;
  v.witnesses["sup_sum_margin"] = 0.5 - s1;
  v.witnesses["delayed_sum_margin"] = 0.25 - s2;
  decide(v, cmp.lt(s1, 0.5) && cmp.le(s2, 0.25));
  return v;
}

PositivityResult certify_positivity(const Equation& eq, const CheckOptions& opts) {
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  const bool nonneg = nonnegative(eq, w, cmp);
  const Index lead = 5 * eq.T();

  if (nonneg && check_lemma4(eq, opts).stable()) {
    return PositivityCertificate{w.start, w.end, 0.0, PositivityMethod::lemma4};
  }
  if (eq.size() == 1 && eq.is_autonomous()) {
    const double a = eq.coeff(0, 0);
    const Index k = eq.term(0).delay.max_lag();
    const bool positive = a == 0.0 || (k == 0 && a >= 0.0 && a < 1.0) || (k >= 1 && check_autonomous_nonosc(a, k));
    if (positive) return PositivityCertificate{0, w.end, 0.0, PositivityMethod::autonomous_bound};
  }
  if (nonneg) {
    std::vector<double> alpha;
    std::vector<Index> tau;
    for (std::size_t l = 0; l < eq.size(); ++l) {
      alpha.push_back(over(eq, w, EstimateMode::sup, [&](Index n) { return eq.coeff(l, n); }).value);
      tau.push_back(eq.term(l).delay.max_lag());
    }
    if (cmp.le(characteristic_min(alpha, tau).value, 0.0)) {
      return PositivityCertificate{w.start, w.end, 0.0, PositivityMethod::corollary3_characteristic};
    }
  }
  auto scanned = positivity_scan(eq, lead, lead + default_span(eq, opts));
  // For nonnegative autonomous equations the characteristic test is exact:
  // without a root in (0, 1] the kernel oscillates, whatever a finite scan shows.
  if (nonneg && eq.is_autonomous()) {
    if (const auto* cert = std::get_if<PositivityCertificate>(&scanned)) {
      return PositivityRefutation{cert->N, cert->n0, cert->min_value};
    }
  }
  return scanned;
}

Verdict check_theorem1(const Equation& eq, const PositivityCertificate& cert, Index p, const CheckOptions& opts) {
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  Verdict v = make_verdict("theorem1", "Theorem 1: positive fundamental function with nonnegative coefficients",
                           Claim::exponential, exact_inputs(eq), w);
  if (!nonnegative(eq, w, cmp)) return not_applicable(std::move(v), "a coefficient takes negative values");
  v.note = "positivity by " + to_string(cert.by);
  if (cert.by == PositivityMethod::numerical_scan) v.witnesses["positivity_min"] = cert.min_value;
  const double a = liminf_sum(eq, w).value;
  v.witnesses["a"] = a;
  if (cmp.pos(a)) {
    v.outcome = Outcome::stable;
    v.witnesses["mu"] = std::max(0.0, 1.0 - a);
    append_note(v, "liminf of the coefficient sum is positive");
    return v;
  }
  const double b = limsup_product(eq, p, w).value;
  v.witnesses["b"] = b;
  v.witnesses["p"] = static_cast<double>(p);
  decide(v, cmp.lt(b, 1.0));
  if (v.stable()) v.witnesses["mu"] = std::pow(std::max(b, 0.0), 1.0 / static_cast<double>(p));
  return v;
}

Verdict check_corollary2(const Equation& eq, Index p, const CheckOptions& opts) {
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  Verdict v = make_verdict("corollary2", "Corollary 2: nonoscillation test combined with Theorem 1",
                           Claim::exponential, exact_inputs(eq), w);
  if (!nonnegative(eq, w, cmp)) return not_applicable(std::move(v), "a coefficient takes negative values");
  const Verdict l4 = check_lemma4(eq, opts);
  v.witnesses = l4.witnesses;
  if (!l4.stable()) {
    v.note = "nonoscillation sums exceed their bounds";
    return v;
  }
  const Verdict t1 = check_theorem1(eq, PositivityCertificate{w.start, w.end, 0.0, PositivityMethod::lemma4}, p, opts);
  v.witnesses.insert(t1.witnesses.begin(), t1.witnesses.end());
  v.outcome = t1.outcome;
  v.note = t1.note;
  return v;
}

Verdict check_corollary3(const Equation& eq, int part, Index p, const CheckOptions& opts) {
  if (part != 1 && part != 2) throw std::invalid_argument("check_corollary3: part must be 1 or 2");
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  Verdict v = make_verdict(part == 1 ? "corollary3_part1" : "corollary3_part2",
                           part == 1 ? "Corollary 3, part 1: characteristic inequality of the majorant equation"
                                     : "Corollary 3, part 2: single delay below the nonoscillation threshold",
                           Claim::exponential, exact_inputs(eq), w);
  if (!nonnegative(eq, w, cmp)) return not_applicable(std::move(v), "a coefficient takes negative values");
  bool positive = false;
  if (part == 1) {
    std::vector<double> alpha;
    std::vector<Index> tau;
    for (std::size_t l = 0; l < eq.size(); ++l) {
      alpha.push_back(over(eq, w, EstimateMode::sup, [&](Index n) { return eq.coeff(l, n); }).value);
      tau.push_back(eq.term(l).delay.max_lag());
    }
    const auto cm = characteristic_min(alpha, tau);
    v.witnesses["lambda"] = cm.lambda;
    v.witnesses["f_min"] = cm.value;
    positive = cmp.le(cm.value, 0.0);
  } else {
    if (eq.size() != 1) return not_applicable(std::move(v), "needs exactly one term");
    const Index k = eq.term(0).delay.max_lag();
    if (k < 1) return not_applicable(std::move(v), "needs a delay of at least one step");
    const double sup_a = over(eq, w, EstimateMode::sup, [&](Index n) { return eq.coeff(0, n); }).value;
    const double threshold = nonoscillation_threshold(k);
    v.witnesses["sup_a"] = sup_a;
    v.witnesses["threshold"] = threshold;
    if (!cmp.le(sup_a, threshold)) return not_applicable(std::move(v), "coefficient exceeds k^k/(k+1)^(k+1)");
    positive = true;
  }
  const double b = limsup_product(eq, p, w).value;
  v.witnesses["b"] = b;
  v.witnesses["p"] = static_cast<double>(p);
  decide(v, positive && cmp.lt(b, 1.0));
  if (v.stable()) v.witnesses["mu"] = std::pow(std::max(b, 0.0), 1.0 / static_cast<double>(p));
  return v;
}

Verdict check_theorem2(const Equation& eq, std::span<const std::size_t> I, Index p, const CheckOptions& opts) {
  if (I.empty()) throw std::invalid_argument("check_theorem2: empty index set");
  for (std::size_t l : I) {
    if (l >= eq.size()) throw std::out_of_range("check_theorem2: term index out of range");
  }
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  Verdict v = make_verdict("theorem2", "Theorem 2: dominant nonnegative subset with positive kernel",
                           Claim::exponential, exact_inputs(eq), w);
  v.note = index_set(I);
  if (!nonnegative(eq, I, w, cmp)) return not_applicable(std::move(v), v.note + " contain a negative coefficient");
  const double inf_sum = over(eq, w, EstimateMode::inf, [&](Index n) { return sum_over(eq, I, n); }).value;
  v.witnesses["inf_dominant_sum"] = inf_sum;
  if (!cmp.pos(inf_sum)) return not_applicable(std::move(v), v.note + ": dominant sum not bounded away from zero");

  const Equation sub = subset_equation(eq, I);
  const double ratio =
      over(eq, w, EstimateMode::limsup, [&](Index n) { return abs_sum_outside(eq, I, n) / sum_over(eq, I, n); }).value;
  const double b = limsup_product(sub, p, w).value;
  v.witnesses["ratio"] = ratio;
  v.witnesses["b"] = b;
  v.witnesses["p"] = static_cast<double>(p);
  const auto positivity = certify_positivity(sub, opts);
  if (const auto* ref = std::get_if<PositivityRefutation>(&positivity)) {
    v.witnesses["refutation_n"] = static_cast<double>(ref->n);
    v.witnesses["refutation_k"] = static_cast<double>(ref->k);
    v.witnesses["refutation_value"] = ref->value;
    append_note(v, "subset equation has no positivity certificate");
    return v;
  }
  append_note(v, "positivity by " + to_string(std::get<PositivityCertificate>(positivity).by));
  decide(v, cmp.lt(b, 1.0) && cmp.lt(ratio, 1.0));
  return v;
}

double comparison_gap_lhs(const Equation& eq, std::span<const std::size_t> I, std::span<const DelaySpec> g, Index n) {
  double lhs = abs_sum_outside(eq, I, n);
  for (std::size_t i = 0; i < I.size(); ++i) {
    const Index h = eq.argument(I[i], n);
    const Index gn = g[i].argument(n);
    double gap = 0.0;
    for (Index j = std::min(h, gn); j < std::max(h, gn); ++j) gap += eq.coeff_abs_sum(j);
    lhs += std::fabs(eq.coeff(I[i], n)) * gap;
  }
  return lhs;
}

namespace {

Verdict comparison_delay_check(const Equation& eq, std::span<const std::size_t> I, std::span<const DelaySpec> g,
                               const CheckOptions& opts, std::string id, std::string citation) {
  if (I.empty()) throw std::invalid_argument(id + ": empty index set");
  if (g.size() != I.size()) throw std::invalid_argument(id + ": one comparison delay per index required");
  for (std::size_t l : I) {
    if (l >= eq.size()) throw std::out_of_range(id + ": term index out of range");
  }
  const Cmp cmp{opts.eps_cmp};
  Index reach = 0;
  for (const auto& d : g) reach = std::max(reach, d.max_lag());
  const IndexWindow w = check_window(eq, opts, reach);
  Verdict v = make_verdict(std::move(id), std::move(citation), Claim::exponential, period_with(eq, g).has_value(), w);
  v.note = index_set(I);

  const double alpha0 = over(eq, w, EstimateMode::inf, [&](Index n) { return sum_over(eq, I, n); }, g).value;
  const double alpha1 = over(eq, w, EstimateMode::sup, [&](Index n) { return sum_over(eq, I, n); }, g).value;
  v.witnesses["alpha0"] = alpha0;
  v.witnesses["alpha1"] = alpha1;
  const double gamma = over(eq, w, EstimateMode::limsup,
                            [&](Index n) { return comparison_gap_lhs(eq, I, g, n) / sum_over(eq, I, n); }, g)
                           .value;
  const double lhs_max =
      over(eq, w, EstimateMode::sup, [&](Index n) { return comparison_gap_lhs(eq, I, g, n); }, g).value;
  v.witnesses["gamma_min"] = gamma;
  v.witnesses["lhs_max"] = lhs_max;
  if (!cmp.pos(alpha0) || !cmp.lt(alpha1, 1.0)) {
    return not_applicable(std::move(v), v.note + ": dominant sum not inside (0, 1)");
  }
  // Distinct comparison delays need a nonnegative comparison equation; a common one aggregates.
  const bool common = std::all_of(g.begin(), g.end(), [&](const DelaySpec& d) { return d == g.front(); });
  if (!common && !nonnegative(eq, I, w, cmp)) {
    return not_applicable(std::move(v), v.note + " contain a negative coefficient");
  }

  std::vector<Term> comparison;
  for (std::size_t i = 0; i < I.size(); ++i) comparison.push_back(Term{eq.term(I[i]).coeff, g[i]});
  const Equation comp = validate(std::move(comparison), std::nullopt,
                                 std::max(eq.validation_window().length(), min_validation_window(reach)));
  const auto positivity = certify_positivity(comp, opts);
  if (const auto* ref = std::get_if<PositivityRefutation>(&positivity)) {
    v.witnesses["refutation_n"] = static_cast<double>(ref->n);
    v.witnesses["refutation_k"] = static_cast<double>(ref->k);
    v.witnesses["refutation_value"] = ref->value;
    append_note(v, "comparison equation has no positivity certificate");
    return v;
  }
  const auto& cert = std::get<PositivityCertificate>(positivity);
  append_note(v, "comparison positivity by " + to_string(cert.by));
  if (cert.by == PositivityMethod::numerical_scan) v.witnesses["positivity_min"] = cert.min_value;
  decide(v, cmp.lt(gamma, 1.0));
  return v;
}

}  // namespace

Verdict check_corollary4(const Equation& eq, std::span<const std::size_t> I, std::span<const DelaySpec> g,
                         const CheckOptions& opts) {
  return comparison_delay_check(eq, I, g, opts, "corollary4",
                                "Corollary 4: comparison equation with modified delays");
}

Verdict check_corollary5(const Equation& eq, const DelaySpec& g, const CheckOptions& opts) {
  const auto all = all_indices(eq);
  const std::vector<DelaySpec> delays(eq.size(), g);
  Verdict v = comparison_delay_check(eq, all, delays, opts, "corollary5",
                                     "Corollary 5: comparison equation with one common delay");
  append_note(v, "common delay " + g.to_string());
  return v;
}

Verdict check_corollary6(const Equation& eq, const CheckOptions& opts) {
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  Verdict v = make_verdict("corollary6", "Corollary 6: dominant one-step delayed term below 1/4", Claim::exponential,
                           exact_inputs(eq), w);
  std::optional<Verdict> best;
  for (std::size_t l0 = 0; l0 < eq.size(); ++l0) {
    if (!(eq.term(l0).delay == DelaySpec::constant(1))) continue;
    Verdict cand = v;
    cand.note = "dominant term " + std::to_string(l0);
    const double lo = over(eq, w, EstimateMode::inf, [&](Index n) { return eq.coeff(l0, n); }).value;
    const double hi = over(eq, w, EstimateMode::sup, [&](Index n) { return eq.coeff(l0, n); }).value;
    cand.witnesses["a0"] = lo;
    cand.witnesses["b0"] = hi;
    if (!cmp.pos(lo) || !cmp.lt(hi, 0.25)) {
      cand = not_applicable(std::move(cand), cand.note + " not inside (0, 1/4)");
    } else {
      const std::size_t I[] = {l0};
      const double gamma =
          over(eq, w, EstimateMode::limsup, [&](Index n) { return abs_sum_outside(eq, I, n) / eq.coeff(l0, n); })
              .value;
      cand.witnesses["gamma"] = gamma;
      decide(cand, cmp.lt(gamma, 1.0));
    }
    auto rank = [](const Verdict& x) { return static_cast<int>(x.outcome); };
    if (!best || rank(cand) < rank(*best)) best = cand;
  }
  if (!best) return not_applicable(std::move(v), "no term with delay exactly one");
  return *best;
}

Verdict check_corollary7(const Equation& eq, const CheckOptions& opts) {
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  Verdict v = make_verdict("corollary7", "Corollary 7: coefficient sum below 1/4 with delayed absolute sums",
                           Claim::exponential, exact_inputs(eq), w);
  const double lo = over(eq, w, EstimateMode::inf, [&](Index n) { return eq.coeff_sum(n); }).value;
  const double hi = over(eq, w, EstimateMode::sup, [&](Index n) { return eq.coeff_sum(n); }).value;
  v.witnesses["a0"] = lo;
  v.witnesses["b0"] = hi;
  if (!cmp.pos(lo) || !cmp.lt(hi, 0.25)) return not_applicable(std::move(v), "coefficient sum not inside (0, 1/4)");
  auto lhs = [&](Index n) {
    double s = 0.0;
    for (std::size_t k = 0; k < eq.size(); ++k) {
      double inner = 0.0;
      // Gap between h_k(n) and the comparison argument n - 1.
      const Index h = eq.argument(k, n);
      for (Index j = std::min(h, n - 1); j < std::max(h, n - 1); ++j) inner += eq.coeff_abs_sum(j);
      s += std::fabs(eq.coeff(k, n)) * inner;
    }
    return s;
  };
  const double gamma = over(eq, w, EstimateMode::limsup, [&](Index n) { return lhs(n) / eq.coeff_sum(n); }).value;
  v.witnesses["gamma"] = gamma;
  decide(v, cmp.lt(gamma, 1.0));
  return v;
}

Verdict check_corollary8(const Equation& eq, int part, const CheckOptions& opts) {
  if (eq.size() != 2) throw std::invalid_argument("check_corollary8: needs exactly two terms");
  if (part != 1 && part != 2) throw std::invalid_argument("check_corollary8: part must be 1 or 2");
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  Verdict v = make_verdict(part == 1 ? "corollary8_part1" : "corollary8_part2",
                           part == 1 ? "Corollary 8, part 1: dominant delayed term"
                                     : "Corollary 8, part 2: dominant coefficient sum at the first delay",
                           Claim::exponential, exact_inputs(eq), w);
  auto a = [&](Index n) { return eq.coeff(0, n); };
  auto b = [&](Index n) { return eq.coeff(1, n); };
  const std::size_t first[] = {0};
  const std::size_t both[] = {0, 1};
  if (part == 1) {
    const double lo = over(eq, w, EstimateMode::inf, a).value;
    const double hi = over(eq, w, EstimateMode::sup, a).value;
    v.witnesses["a0"] = lo;
    v.witnesses["a1"] = hi;
    if (!cmp.pos(lo) || !cmp.lt(hi, 0.5)) return not_applicable(std::move(v), "a(n) not inside (0, 1/2)");
    const double window_sum = delayed_sum(eq, first, eq.term(0).delay, SumUpper::to_n_minus_1, w).value;
    const double gamma = over(eq, w, EstimateMode::limsup, [&](Index n) { return std::fabs(b(n)) / a(n); }).value;
    v.witnesses["window_sum"] = window_sum;
    v.witnesses["gamma"] = gamma;
    decide(v, cmp.le(window_sum, 0.25) && cmp.lt(gamma, 1.0));
    return v;
  }
  const double lo = over(eq, w, EstimateMode::inf, [&](Index n) { return a(n) + b(n); }).value;
  const double hi = over(eq, w, EstimateMode::sup, [&](Index n) { return a(n) + b(n); }).value;
  v.witnesses["a0"] = lo;
  v.witnesses["a1"] = hi;
  if (!cmp.pos(lo) || !cmp.lt(hi, 0.5)) return not_applicable(std::move(v), "a(n) + b(n) not inside (0, 1/2)");
  const double window_sum = delayed_sum(eq, both, eq.term(0).delay, SumUpper::to_n_minus_1, w).value;
  auto gap = [&](Index n) {
    const Index g = eq.argument(0, n);
    const Index h = eq.argument(1, n);
    double s = 0.0;
    for (Index k = std::min(g, h); k < std::max(g, h); ++k) s += std::fabs(a(k)) + std::fabs(b(k));
    return std::fabs(b(n)) * s;
  };
  const double gamma = over(eq, w, EstimateMode::limsup, [&](Index n) { return gap(n) / (a(n) + b(n)); }).value;
  v.witnesses["window_sum"] = window_sum;
  v.witnesses["gamma"] = gamma;
  decide(v, cmp.le(window_sum, 0.25) && cmp.lt(gamma, 1.0));
  return v;
}

Verdict check_corollary9(double a, Index g, double b, Index h, int part, const CheckOptions& opts) {
  if (a * static_cast<double>(g) == 0.0 || b * static_cast<double>(h) == 0.0) {
    throw std::invalid_argument("check_corollary9: needs a*g != 0 and b*h != 0");
  }
  if (part != 1 && part != 2) throw std::invalid_argument("check_corollary9: part must be 1 or 2");
  if (g < 0 || h < 0) throw std::invalid_argument("check_corollary9: delays must be nonnegative");
  const Cmp cmp{opts.eps_cmp};
  Verdict v = make_verdict(part == 1 ? "corollary9_part1" : "corollary9_part2",
                           part == 1 ? "Corollary 9, part 1: autonomous two-delay test, dominant first term"
                                     : "Corollary 9, part 2: autonomous two-delay test, dominant sum",
                           Claim::exponential, true, IndexWindow{0, 0});
  const double threshold = nonoscillation_threshold(g);
  v.witnesses["threshold"] = threshold;
  if (part == 1) {
    if (!cmp.pos(a) || !cmp.le(a, threshold)) return not_applicable(std::move(v), "a not inside (0, g^g/(g+1)^(g+1)]");
    v.witnesses["ratio"] = std::fabs(b) / a;
    decide(v, cmp.lt(std::fabs(b), a));
    return v;
  }
  const double s = a + b;
  v.witnesses["sum"] = s;
  if (!cmp.pos(s) || !cmp.le(s, threshold)) return not_applicable(std::move(v), "a + b not inside (0, g^g/(g+1)^(g+1)]");
  const double lhs = std::fabs(b) * static_cast<double>(std::llabs(g - h)) * (std::fabs(a) + std::fabs(b));
  v.witnesses["gap_term"] = lhs;
  v.witnesses["gamma"] = lhs / s;
  decide(v, cmp.lt(lhs, s));
  return v;
}

Verdict check_corollary10(std::span<const double> a, const CheckOptions& opts) {
  if (a.empty()) throw std::invalid_argument("check_corollary10: empty coefficient list");
  const Cmp cmp{opts.eps_cmp};
  Verdict v = make_verdict("corollary10", "Corollary 10: autonomous equation with delays 1..m", Claim::exponential,
                           true, IndexWindow{0, 0});
  const auto m = static_cast<Index>(a.size());
  for (Index k = 1; k <= m; ++k) {
    const double head = std::accumulate(a.begin(), a.begin() + k, 0.0);
    double tail = 0.0;
    for (Index l = k; l < m; ++l) tail += std::fabs(a[static_cast<std::size_t>(l)]);
    const double threshold = nonoscillation_threshold(k);
    // The dominant block needs a positive kernel, hence nonnegative a_1..a_k.
    const bool signed_ok = std::all_of(a.begin(), a.begin() + k, [&](double x) { return x >= -cmp.eps; });
    if (!signed_ok) continue;
    if (k == 1 || (cmp.pos(head) && cmp.le(head, threshold) && cmp.lt(tail, head))) {
      v.witnesses["k"] = static_cast<double>(k);
      v.witnesses["head_sum"] = head;
      v.witnesses["tail_abs_sum"] = tail;
      v.witnesses["threshold"] = threshold;
    }
    if (cmp.pos(head) && cmp.le(head, threshold) && cmp.lt(tail, head)) {
      v.outcome = Outcome::stable;
      return v;
    }
  }
  return v;
}

std::vector<Verdict> check_classical(const Equation& eq, const CheckOptions& opts) {
  const Cmp cmp{opts.eps_cmp};
  const IndexWindow w = check_window(eq, opts);
  const bool exact = exact_inputs(eq);
  std::vector<Verdict> out;

  {
    Verdict v = make_verdict("classical_delay_sum", "Classical test: delayed sum below 3/2 + 1/(2k+2)",
                             Claim::asymptotic, exact, w);
    double total = 0.0;
    for (Index n = w.start; n <= w.end; ++n) total += eq.coeff_sum(n);
    v.witnesses["window_total"] = total;
    if (!nonnegative(eq, w, cmp)) {
      out.push_back(not_applicable(std::move(v), "a coefficient takes negative values"));
    } else if (total < 1.0) {
      out.push_back(not_applicable(std::move(v), "coefficient sum does not diverge on the window"));
    } else {
      // Lower limit at the largest delay of any term.
      const auto all = all_indices(eq);
      const DelaySpec h = reach_delay(eq, all);
      const Index k = h.max_lag();
      const double sum = delayed_sum(eq, all, h, SumUpper::to_n, w).value;
      const double bound = 1.5 + 1.0 / (2.0 * static_cast<double>(k) + 2.0);
      v.witnesses["sum"] = sum;
      v.witnesses["bound"] = bound;
      v.witnesses["k"] = static_cast<double>(k);
      decide(v, cmp.lt(sum, bound));
      out.push_back(std::move(v));
    }
  }

  {
    Verdict v = make_verdict("classical_constant_delays", "Classical test: sum of a_l tau_l below 1 + 1/e - sum a_l",
                             Claim::asymptotic, exact, w);
    bool positive = eq.is_autonomous();
    for (std::size_t l = 0; positive && l < eq.size(); ++l) positive = cmp.pos(eq.coeff(l, 0));
    if (!positive) {
      out.push_back(not_applicable(std::move(v), "needs positive constant coefficients and delays"));
    } else {
      double weighted = 0.0;
      double total = 0.0;
      for (std::size_t l = 0; l < eq.size(); ++l) {
        weighted += eq.coeff(l, 0) * static_cast<double>(eq.term(l).delay.max_lag());
        total += eq.coeff(l, 0);
      }
      const double bound = 1.0 + std::exp(-1.0) - total;
      v.witnesses["weighted_sum"] = weighted;
      v.witnesses["bound"] = bound;
      decide(v, cmp.lt(weighted, bound));
      out.push_back(std::move(v));
    }
  }

  {
    Verdict v = make_verdict("classical_pi_half", "Classical test: sum of k a_k below pi/2", Claim::asymptotic, exact,
                             w);
    double diagnostic = 0.0;
    double condition = 0.0;
    for (std::size_t l = 0; l < eq.size(); ++l) {
      auto window_abs = [&](Index extra) {
        return over(eq, w, EstimateMode::sup, [&, extra](Index n) {
                 double s = 0.0;
                 for (Index k = eq.argument(l, n); k < n + extra; ++k) s += std::fabs(eq.coeff(l, k));
                 return s;
               }).value;
      };
      diagnostic += window_abs(0);
      condition += window_abs(1);
    }
    v.witnesses["diagnostic_sum"] = diagnostic;
    v.witnesses["condition_sum"] = condition;
    v.witnesses["bound"] = std::numbers::pi / 2.0;
    bool autonomous_positive = eq.is_autonomous();
    for (std::size_t l = 0; autonomous_positive && l < eq.size(); ++l) {
      autonomous_positive = cmp.pos(eq.coeff(l, 0)) && eq.term(l).delay.max_lag() >= 1;
    }
    if (!cmp.lt(condition, std::numbers::pi / 2.0)) {
      v.note = "delayed absolute sum is not below pi/2";
      out.push_back(std::move(v));
    } else if (!autonomous_positive) {
      out.push_back(not_applicable(std::move(v), "needs positive constant coefficients with delays 1..m"));
    } else {
      v.outcome = Outcome::stable;
      out.push_back(std::move(v));
    }
  }
  return out;
}

namespace {

int outcome_rank(const Verdict& v) {
  switch (v.outcome) {
    case Outcome::stable: return 0;
    case Outcome::inconclusive: return 1;
    case Outcome::not_applicable: return 2;
  }
  return 2;
}

/// First Stable candidate, else the first Inconclusive, else the first.
Verdict pick(std::vector<Verdict> candidates) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (outcome_rank(candidates[i]) < outcome_rank(candidates[best])) best = i;
  }
  return std::move(candidates[best]);
}

/// I = all first, then every other nonempty subset (or the singleton complements above the cap).
std::vector<std::vector<std::size_t>> index_subsets(const Equation& eq, const CheckOptions& opts) {
  const std::size_t m = eq.size();
  std::vector<std::vector<std::size_t>> out{all_indices(eq)};
  if (m <= opts.full_subset_max_terms) {
    const std::uint64_t full = (std::uint64_t{1} << m) - 1;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      std::vector<std::size_t> I;
      for (std::size_t l = 0; l < m; ++l) {
        if (mask & (std::uint64_t{1} << l)) I.push_back(l);
      }
      out.push_back(std::move(I));
    }
  } else {
    for (std::size_t drop = 0; drop < m; ++drop) {
      std::vector<std::size_t> I;
      for (std::size_t l = 0; l < m; ++l) {
        if (l != drop) I.push_back(l);
      }
      out.push_back(std::move(I));
    }
  }
  return out;
}

std::vector<DelaySpec> distinct_delays(const Equation& eq) {
  std::vector<DelaySpec> out;
  for (const auto& t : eq.terms()) {
    if (std::find(out.begin(), out.end(), t.delay) == out.end()) out.push_back(t.delay);
  }
  return out;
}

Equation swapped(const Equation& eq) {
  return validate({eq.term(1), eq.term(0)}, std::nullopt, eq.validation_window().length());
}

Verdict theorem1_auto(const Equation& eq, const ProductCondition& pc, const CheckOptions& opts) {
  const auto positivity = certify_positivity(eq, opts);
  if (const auto* cert = std::get_if<PositivityCertificate>(&positivity)) return check_theorem1(eq, *cert, pc.p, opts);
  Verdict v = check_theorem1(eq, PositivityCertificate{}, pc.p, opts);
  if (v.outcome == Outcome::not_applicable) return v;
  const auto& ref = std::get<PositivityRefutation>(positivity);
  v.outcome = Outcome::inconclusive;
  v.witnesses.erase("mu");
  v.witnesses.erase("positivity_min");
  v.witnesses["refutation_n"] = static_cast<double>(ref.n);
  v.witnesses["refutation_k"] = static_cast<double>(ref.k);
  v.witnesses["refutation_value"] = ref.value;
  v.note = "no positivity certificate for the fundamental function";
  return v;
}

using Runner = std::function<std::vector<Verdict>(const Equation&, const CheckOptions&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> table = {
      {"lemma4", [](const Equation& eq, const CheckOptions& o) { return std::vector<Verdict>{check_lemma4(eq, o)}; }},
      {"theorem1",
       [](const Equation& eq, const CheckOptions& o) {
         return std::vector<Verdict>{theorem1_auto(eq, best_product_condition(eq, o), o)};
       }},
      {"corollary2",
       [](const Equation& eq, const CheckOptions& o) {
         return std::vector<Verdict>{check_corollary2(eq, best_product_condition(eq, o).p, o)};
       }},
      {"corollary3_part1",
       [](const Equation& eq, const CheckOptions& o) {
         return std::vector<Verdict>{check_corollary3(eq, 1, best_product_condition(eq, o).p, o)};
       }},
      {"corollary3_part2",
       [](const Equation& eq, const CheckOptions& o) {
         return std::vector<Verdict>{check_corollary3(eq, 2, best_product_condition(eq, o).p, o)};
       }},
      {"theorem2",
       [](const Equation& eq, const CheckOptions& o) {
         std::vector<Verdict> cands;
         for (const auto& I : index_subsets(eq, o)) {
           const Equation sub = subset_equation(eq, I);
           cands.push_back(check_theorem2(eq, I, best_product_condition(sub, o).p, o));
           if (cands.back().stable()) break;
         }
         return std::vector<Verdict>{pick(std::move(cands))};
       }},
      {"corollary4",
       [](const Equation& eq, const CheckOptions& o) {
         std::vector<Verdict> cands;
         const auto common = distinct_delays(eq);
         for (const auto& I : index_subsets(eq, o)) {
           std::vector<DelaySpec> own;
           for (std::size_t l : I) own.push_back(eq.term(l).delay);
           cands.push_back(check_corollary4(eq, I, own, o));
           if (cands.back().stable()) break;
           for (const auto& d : common) {
             const std::vector<DelaySpec> g(I.size(), d);
             if (g == own) continue;
             cands.push_back(check_corollary4(eq, I, g, o));
             append_note(cands.back(), "common delay " + d.to_string());
             if (cands.back().stable()) break;
           }
           if (cands.back().stable()) break;
         }
         return std::vector<Verdict>{pick(std::move(cands))};
       }},
      {"corollary5",
       [](const Equation& eq, const CheckOptions& o) {
         std::vector<Verdict> cands;
         for (const auto& d : distinct_delays(eq)) {
           cands.push_back(check_corollary5(eq, d, o));
           if (cands.back().stable()) break;
         }
         return std::vector<Verdict>{pick(std::move(cands))};
       }},
      {"corollary6",
       [](const Equation& eq, const CheckOptions& o) { return std::vector<Verdict>{check_corollary6(eq, o)}; }},
      {"corollary7",
       [](const Equation& eq, const CheckOptions& o) { return std::vector<Verdict>{check_corollary7(eq, o)}; }},
      {"corollary8_part1",
       [](const Equation& eq, const CheckOptions& o) -> std::vector<Verdict> {
         if (eq.size() != 2) return {};
         const Equation other = swapped(eq);
         return {pick({check_corollary8(eq, 1, o), check_corollary8(other, 1, o)})};
       }},
      {"corollary8_part2",
       [](const Equation& eq, const CheckOptions& o) -> std::vector<Verdict> {
         if (eq.size() != 2) return {};
         const Equation other = swapped(eq);
         return {pick({check_corollary8(eq, 2, o), check_corollary8(other, 2, o)})};
       }},
      {"corollary9_part1",
       [](const Equation& eq, const CheckOptions& o) -> std::vector<Verdict> {
         if (eq.size() != 2 || !eq.is_autonomous()) return {};
         const double a = eq.coeff(0, 0), b = eq.coeff(1, 0);
         const Index g = eq.term(0).delay.max_lag(), h = eq.term(1).delay.max_lag();
         if (a * static_cast<double>(g) == 0.0 || b * static_cast<double>(h) == 0.0) return {};
         return {pick({check_corollary9(a, g, b, h, 1, o), check_corollary9(b, h, a, g, 1, o)})};
       }},
      {"corollary9_part2",
       [](const Equation& eq, const CheckOptions& o) -> std::vector<Verdict> {
         if (eq.size() != 2 || !eq.is_autonomous()) return {};
         const double a = eq.coeff(0, 0), b = eq.coeff(1, 0);
         const Index g = eq.term(0).delay.max_lag(), h = eq.term(1).delay.max_lag();
         if (a * static_cast<double>(g) == 0.0 || b * static_cast<double>(h) == 0.0) return {};
         return {pick({check_corollary9(a, g, b, h, 2, o), check_corollary9(b, h, a, g, 2, o)})};
       }},
      {"corollary10",
       [](const Equation& eq, const CheckOptions& o) -> std::vector<Verdict> {
         if (!eq.is_autonomous()) return {};
         std::vector<double> a(static_cast<std::size_t>(std::max<Index>(eq.T(), 1)), 0.0);
         for (std::size_t l = 0; l < eq.size(); ++l) {
           const Index lag = eq.term(l).delay.max_lag();
           if (lag == 0) {
             Verdict v = make_verdict("corollary10", "Corollary 10: autonomous equation with delays 1..m",
                                      Claim::exponential, true, IndexWindow{0, 0});
             return {not_applicable(std::move(v), "a term has no delay")};
           }
           a[static_cast<std::size_t>(lag - 1)] += eq.coeff(l, 0);
         }
         return {check_corollary10(a, o)};
       }},
      {"classical_delay_sum",
       [](const Equation& eq, const CheckOptions& o) {
         auto all = check_classical(eq, o);
         return std::vector<Verdict>{all[0]};
       }},
      {"classical_constant_delays",
       [](const Equation& eq, const CheckOptions& o) {
         auto all = check_classical(eq, o);
         return std::vector<Verdict>{all[1]};
       }},
      {"classical_pi_half",
       [](const Equation& eq, const CheckOptions& o) {
         auto all = check_classical(eq, o);
         return std::vector<Verdict>{all[2]};
       }},
  };
  return table;
}

void sort_verdicts(std::vector<Verdict>& out) {
  std::stable_sort(out.begin(), out.end(), [](const Verdict& a, const Verdict& b) {
    if (a.stable() != b.stable()) return a.stable();
    return a.criterion < b.criterion;
  });
}

}  // namespace

const std::vector<std::string>& criterion_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& [id, run] : registry()) out.push_back(id);
    return out;
  }();
  return ids;
}

std::vector<Verdict> run_selected(const Equation& eq, std::span<const std::string> ids, const CheckOptions& opts) {
  for (const auto& id : ids) {
    const auto& all = criterion_ids();
    if (std::find(all.begin(), all.end(), id) == all.end()) throw std::invalid_argument("unknown criterion id: " + id);
  }
  std::vector<Verdict> out;
  for (const auto& [id, run] : registry()) {
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    auto part = run(eq, opts);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  sort_verdicts(out);
  return out;
}

std::vector<Verdict> run_all(const Equation& eq, const CheckOptions& opts) {
  std::vector<std::string> ids;
  for (const auto& id : criterion_ids()) {
    if (id != "lemma4") ids.push_back(id);
  }
  return run_selected(eq, ids, opts);
}

}  // namespace ddestab
