#pragma once

// Closed-form integer-indexed sequences used for coefficients and forcing
// terms, plus integer delay tables.
//
// Grammar (standard precedence, ^ is right-associative and binds tighter than
// unary minus):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'n' | '(' expr ')'
//            | ('sin' | 'cos' | 'abs') '(' expr ')'
//            | 'alt' [ '(' expr ')' ]          -- (-1)^n, or (-1)^arg
//            | 'per' '(' expr (',' expr)* ')'  -- table indexed by n mod p
//            | 'splice' '(' integer ',' expr ',' expr ')'
//
// splice(n1, a, b) evaluates a for n < n1 and b otherwise.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddestab {

using Index = std::int64_t;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  [[nodiscard]] std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Raised when an expression has no finite value at some index.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& message, Index index);
  [[nodiscard]] Index index() const noexcept { return index_; }

 private:
  Index index_;
};

class SeqExpr {
 public:
  struct Node;

  /// The zero sequence.
  SeqExpr();

  static SeqExpr parse(std::string_view text);
  static SeqExpr constant(double value);
  static SeqExpr periodic(const std::vector<double>& table);

  friend SeqExpr operator+(const SeqExpr& lhs, const SeqExpr& rhs);
  friend SeqExpr operator-(const SeqExpr& lhs, const SeqExpr& rhs);
  friend SeqExpr operator*(const SeqExpr& lhs, const SeqExpr& rhs);
  friend SeqExpr operator/(const SeqExpr& lhs, const SeqExpr& rhs);
  friend SeqExpr operator-(const SeqExpr& operand);
  friend SeqExpr abs(const SeqExpr& operand);

  /// Piecewise sequence: `before` on [0, n1), `after` from n1 on.
  static SeqExpr splice(Index n1, const SeqExpr& before, const SeqExpr& after);

  /// Value at index n >= 0. Throws EvalError when the value is not finite.
  [[nodiscard]] double eval(Index n) const;
  [[nodiscard]] double operator()(Index n) const { return eval(n); }

  /// Canonical printed form; parse(to_string()) evaluates identically.
  [[nodiscard]] std::string to_string() const;

  /// Text the expression was parsed from, or the canonical form for built
  /// expressions.
  [[nodiscard]] const std::string& source() const noexcept { return source_; }

  /// Period implied by the expression structure alone (1 for constants).
  /// Empty when the expression depends on n other than through alt/per.
  [[nodiscard]] std::optional<Index> structural_period() const;

  /// True when some sin/cos has an n-dependent non-periodic argument or the
  /// expression contains a splice; such sequences are never declared
  /// periodic by probing.
  [[nodiscard]] bool probe_periodic_forbidden() const;
  [[nodiscard]] bool contains_splice() const;

 private:
  explicit SeqExpr(std::shared_ptr<const Node> root);
  SeqExpr(std::shared_ptr<const Node> root, std::string source);

  std::shared_ptr<const Node> root_;
  std::string source_;
};

struct SeqClass {
  enum class Tag { constant, periodic, general };

  Tag tag = Tag::general;
  /// 1 for constant, the minimal period for periodic, 0 for general.
  Index period = 0;

  [[nodiscard]] bool exact() const noexcept { return tag != Tag::general; }
  friend bool operator==(const SeqClass&, const SeqClass&) = default;
};

[[nodiscard]] std::string to_string(const SeqClass& cls);

/// Structure-first classification. Expressions built from constants, alt and
/// per are classified exactly; others are probed on [0, probe_len).
[[nodiscard]] SeqClass classify(const SeqExpr& expr, Index probe_len = 256);

struct ValueRange {
  double inf = 0.0;
  double sup = 0.0;
};

/// Exact min/max of the sequence over [n0, n1].
[[nodiscard]] ValueRange bounds_on_window(const SeqExpr& expr, Index n0, Index n1);

/// Integer lag table: h(n) = n - lags[n mod period].
class DelaySpec {
 public:
  DelaySpec() : lags_{0} {}

  static DelaySpec constant(Index lag);
  static DelaySpec periodic(std::vector<Index> lags);

  [[nodiscard]] Index lag_at(Index n) const;
  /// h(n) = n - lag(n).
  [[nodiscard]] Index argument(Index n) const { return n - lag_at(n); }

  [[nodiscard]] Index max_lag() const;
  [[nodiscard]] Index min_lag() const;
  [[nodiscard]] Index period() const noexcept { return static_cast<Index>(lags_.size()); }
  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] const std::vector<Index>& lags() const noexcept { return lags_; }

  /// "3" for a constant lag, "per(3,5)" for a table.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const DelaySpec&, const DelaySpec&) = default;

 private:
  explicit DelaySpec(std::vector<Index> lags) : lags_(std::move(lags)) {}

  std::vector<Index> lags_;
};

[[nodiscard]] Index lcm_period(Index a, Index b);

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace ddestab
