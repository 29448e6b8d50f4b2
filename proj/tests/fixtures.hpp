#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddestab/equation.hpp"

namespace fixtures {

using ddestab::DelaySpec;
using ddestab::Equation;
using ddestab::SeqExpr;
using ddestab::Term;

inline Term term(const std::string& coeff, ddestab::Index lag) {
  return Term{SeqExpr::parse(coeff), DelaySpec::constant(lag)};
}

inline Term term(const std::string& coeff, std::vector<ddestab::Index> lags) {
  return Term{SeqExpr::parse(coeff), DelaySpec::periodic(std::move(lags))};
}

// x(n+1) - x(n) = -(1 - 1/(n+1)) x(n); X(n, k) = k!/n!.
inline Equation factorial_decay() { return ddestab::validate({term("1 - 1/(n+1)", 0)}); }

inline Equation sin_cos_pair() {
  return ddestab::validate({term("0.2+0.05*sin(n)", 1), term("0.1*abs(cos(n))", 20)});
}

inline Equation alternating_pair() {
  return ddestab::validate({term("0.12+0.1*alt(n)", 2), term("0.1+0.11*alt(n)", 14)});
}

// -a(n) x(g(n)) - b(n) x(h(n)) with 2-periodic data.
inline Equation periodic_pair() {
  return ddestab::validate({term("per(-0.12,-0.05)", {3, 5}), term("per(0.17,0.08)", {4, 8})});
}

inline Equation shrinking_coefficient() { return ddestab::validate({term("3^(-n-1)", 0)}); }

// x(n+1) - x(n) = -2.2 x(n-1) + 2 x(n).
inline Equation unstable_pair() { return ddestab::validate({term("2.2", 1), term("-2", 0)}); }

inline Equation autonomous(std::vector<std::pair<double, ddestab::Index>> spec) {
  std::vector<Term> terms;
  for (auto [a, lag] : spec) terms.push_back(Term{SeqExpr::constant(a), DelaySpec::constant(lag)});
  return ddestab::validate(std::move(terms));
}

}  // namespace fixtures
