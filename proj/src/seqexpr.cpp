#include "ddestab/seqexpr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace ddestab {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)),
      position_(position) {}

EvalError::EvalError(const std::string& message, Index index)
    : std::runtime_error(message + " at n=" + std::to_string(index)), index_(index) {}

enum class Kind { number, index, neg, add, sub, mul, div, pow, sin, cos, abs, alt, per, splice };

struct SeqExpr::Node {
  Kind kind = Kind::number;
  double value = 0.0;          // number literal
  Index splice_at = 0;         // splice threshold
  std::vector<double> table;   // per(...) values
  std::vector<std::shared_ptr<const Node>> kids;

  // Structural metadata, computed once at construction.
  std::optional<Index> period;
  bool forbid_probe = false;
  bool has_splice = false;
  // Integer-coefficient polynomial in n; alt() of such an argument is 2-periodic.
  bool integer_poly_in_n = false;
};

namespace {

using NodePtr = std::shared_ptr<const SeqExpr::Node>;

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

NodePtr finish(SeqExpr::Node node) {
  auto& k = node.kids;
  switch (node.kind) {
    case Kind::number:
      node.period = 1;
      node.integer_poly_in_n = is_integer(node.value);
      break;
    case Kind::index:
      node.period = std::nullopt;
      node.integer_poly_in_n = true;
      break;
    case Kind::per:
      node.period = static_cast<Index>(node.table.size());
      break;
    case Kind::splice:
      node.period = std::nullopt;
      node.has_splice = true;
      node.forbid_probe = true;
      break;
    case Kind::alt: {
      const auto& arg = *k[0];
      if (arg.period) {
        node.period = arg.period;
      } else if (arg.integer_poly_in_n) {
        node.period = 2;
      }
      break;
    }
    default: {
      std::optional<Index> p = 1;
      for (const auto& kid : k) {
        if (!kid->period || !p) {
          p.reset();
        } else {
          p = lcm_period(*p, *kid->period);
        }
      }
      node.period = p;
      if (node.kind == Kind::add || node.kind == Kind::sub || node.kind == Kind::mul ||
          node.kind == Kind::neg) {
        node.integer_poly_in_n = std::all_of(
            k.begin(), k.end(), [](const NodePtr& kid) { return kid->integer_poly_in_n; });
      }
      if ((node.kind == Kind::sin || node.kind == Kind::cos) && !k[0]->period) {
        node.forbid_probe = true;
      }
      break;
    }
  }
  for (const auto& kid : k) {
    node.forbid_probe = node.forbid_probe || kid->forbid_probe;
    node.has_splice = node.has_splice || kid->has_splice;
  }
  return std::make_shared<const SeqExpr::Node>(std::move(node));
}

NodePtr make_number(double v) {
  SeqExpr::Node node;
  node.kind = Kind::number;
  node.value = v;
  return finish(std::move(node));
}

NodePtr make_op(Kind kind, std::vector<NodePtr> kids) {
  SeqExpr::Node node;
  node.kind = kind;
  node.kids = std::move(kids);
  return finish(std::move(node));
}

double checked(double v, Index n, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("non-finite result of ") + what, n);
  return v;
}

double eval_node(const SeqExpr::Node& node, Index n) {
  const auto& k = node.kids;
  switch (node.kind) {
    case Kind::number: return node.value;
    case Kind::index: return static_cast<double>(n);
    case Kind::neg: return -eval_node(*k[0], n);
    case Kind::add: return checked(eval_node(*k[0], n) + eval_node(*k[1], n), n, "+");
    case Kind::sub: return checked(eval_node(*k[0], n) - eval_node(*k[1], n), n, "-");
    case Kind::mul: return checked(eval_node(*k[0], n) * eval_node(*k[1], n), n, "*");
    case Kind::div: {
      const double den = eval_node(*k[1], n);
      if (den == 0.0) throw EvalError("division by zero", n);
      return checked(eval_node(*k[0], n) / den, n, "/");
    }
    case Kind::pow: return checked(std::pow(eval_node(*k[0], n), eval_node(*k[1], n)), n, "^");
    case Kind::sin: return std::sin(eval_node(*k[0], n));
    case Kind::cos: return std::cos(eval_node(*k[0], n));
    case Kind::abs: return std::fabs(eval_node(*k[0], n));
    case Kind::alt: {
      const double arg = eval_node(*k[0], n);
      if (!is_integer(arg)) throw EvalError("alt() of a non-integer", n);
      return std::fmod(std::fabs(arg), 2.0) == 0.0 ? 1.0 : -1.0;
    }
    case Kind::per: {
      const auto p = static_cast<Index>(node.table.size());
      return node.table[static_cast<std::size_t>(((n % p) + p) % p)];
    }
    case Kind::splice: return n < node.splice_at ? eval_node(*k[0], n) : eval_node(*k[1], n);
  }
  return 0.0;
}

void print_node(const SeqExpr::Node& node, std::string& out) {
  const auto& k = node.kids;
  auto binary = [&](const char* op) {
    out += '(';
    print_node(*k[0], out);
    out += op;
    print_node(*k[1], out);
    out += ')';
  };
  auto call = [&](const char* name) {
    out += name;
    out += '(';
    print_node(*k[0], out);
    out += ')';
  };
  switch (node.kind) {
    case Kind::number:
      if (std::signbit(node.value)) {
        out += "(-" + format_double(-node.value) + ")";
      } else {
        out += format_double(node.value);
      }
      break;
    case Kind::index: out += 'n'; break;
    case Kind::neg:
      out += "(-";
      print_node(*k[0], out);
      out += ')';
      break;
    case Kind::add: binary(" + "); break;
    case Kind::sub: binary(" - "); break;
    case Kind::mul: binary(" * "); break;
    case Kind::div: binary(" / "); break;
    case Kind::pow: binary("^"); break;
    case Kind::sin: call("sin"); break;
    case Kind::cos: call("cos"); break;
    case Kind::abs: call("abs"); break;
    case Kind::alt: call("alt"); break;
    case Kind::per:
      out += "per(";
      for (std::size_t i = 0; i < node.table.size(); ++i) {
        if (i) out += ", ";
        const double v = node.table[i];
        out += std::signbit(v) ? "-" + format_double(-v) : format_double(v);
      }
      out += ')';
      break;
    case Kind::splice:
      out += "splice(" + std::to_string(node.splice_at) + ", ";
      print_node(*k[0], out);
      out += ", ";
      print_node(*k[1], out);
      out += ')';
      break;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    auto root = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but reached end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_op(Kind::add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make_op(Kind::sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_op(Kind::mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make_op(Kind::div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_op(Kind::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make_op(Kind::pow, {base, unary()});
    return base;
  }

  double number_literal() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(literal.c_str(), &end);
    if (literal.empty() || end != literal.c_str() + literal.size()) {
      pos_ = start;
      fail("malformed number '" + literal + "'");
    }
    if (!std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    return v;
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make_number(number_literal());
    if (accept('(')) {
      auto inner = expr();
      expect(')');
      return inner;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected '" + std::string(1, c) + "'");

    const std::size_t ident_pos = pos_;
    const std::string name = identifier();
    if (name == "n") {
      SeqExpr::Node node;
      node.kind = Kind::index;
      return finish(std::move(node));
    }
    if (name == "sin" || name == "cos" || name == "abs") {
      expect('(');
      auto arg = expr();
      expect(')');
      const Kind kind = name == "sin" ? Kind::sin : name == "cos" ? Kind::cos : Kind::abs;
      return make_op(kind, {arg});
    }
    if (name == "alt") {
      NodePtr arg;
      if (accept('(')) {
        arg = expr();
        expect(')');
      } else {
        SeqExpr::Node node;
        node.kind = Kind::index;
        arg = finish(std::move(node));
      }
      return make_op(Kind::alt, {arg});
    }
    if (name == "per") {
      expect('(');
      SeqExpr::Node node;
      node.kind = Kind::per;
      do {
        const std::size_t at = pos_;
        auto entry = expr();
        if (!entry->period || *entry->period != 1) {
          pos_ = at;
          fail("per() entries must be constant");
        }
        node.table.push_back(eval_node(*entry, 0));
      } while (accept(','));
      expect(')');
      return finish(std::move(node));
    }
    if (name == "splice") {
      expect('(');
      skip_ws();
      const std::size_t at = pos_;
      bool negative = accept('-');
      const double threshold = number_literal();
      if (!is_integer(threshold)) {
        pos_ = at;
        fail("splice() threshold must be an integer");
      }
      expect(',');
      auto before = expr();
      expect(',');
      auto after = expr();
      expect(')');
      SeqExpr::Node node;
      node.kind = Kind::splice;
      node.splice_at = static_cast<Index>(negative ? -threshold : threshold);
      node.kids = {before, after};
      return finish(std::move(node));
    }
    pos_ = ident_pos;
    fail("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SeqExpr::SeqExpr() : SeqExpr(make_number(0.0)) {}

SeqExpr::SeqExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {
  source_ = to_string();
}

SeqExpr::SeqExpr(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

SeqExpr SeqExpr::parse(std::string_view text) {
  Parser parser(text);
  return SeqExpr(parser.parse_all(), std::string(text));
}

SeqExpr SeqExpr::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("SeqExpr::constant: value must be finite");
  return SeqExpr(make_number(value));
}

SeqExpr SeqExpr::periodic(const std::vector<double>& table) {
  if (table.empty()) throw std::invalid_argument("SeqExpr::periodic: empty table");
  for (double v : table) {
    if (!std::isfinite(v)) throw std::invalid_argument("SeqExpr::periodic: values must be finite");
  }
  Node node;
  node.kind = Kind::per;
  node.table = table;
  return SeqExpr(finish(std::move(node)));
}

SeqExpr operator+(const SeqExpr& lhs, const SeqExpr& rhs) { return SeqExpr(make_op(Kind::add, {lhs.root_, rhs.root_})); }
SeqExpr operator-(const SeqExpr& lhs, const SeqExpr& rhs) { return SeqExpr(make_op(Kind::sub, {lhs.root_, rhs.root_})); }
SeqExpr operator*(const SeqExpr& lhs, const SeqExpr& rhs) { return SeqExpr(make_op(Kind::mul, {lhs.root_, rhs.root_})); }
SeqExpr operator/(const SeqExpr& lhs, const SeqExpr& rhs) { return SeqExpr(make_op(Kind::div, {lhs.root_, rhs.root_})); }
SeqExpr operator-(const SeqExpr& operand) { return SeqExpr(make_op(Kind::neg, {operand.root_})); }
SeqExpr abs(const SeqExpr& operand) { return SeqExpr(make_op(Kind::abs, {operand.root_})); }

SeqExpr SeqExpr::splice(Index n1, const SeqExpr& before, const SeqExpr& after) {
  Node node;
  node.kind = Kind::splice;
  node.splice_at = n1;
  node.kids = {before.root_, after.root_};
  return SeqExpr(finish(std::move(node)));
}

double SeqExpr::eval(Index n) const {
  const double v = eval_node(*root_, n);
  if (!std::isfinite(v)) throw EvalError("non-finite value", n);
  return v;
}

std::string SeqExpr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

std::optional<Index> SeqExpr::structural_period() const { return root_->period; }
bool SeqExpr::probe_periodic_forbidden() const { return root_->forbid_probe; }
bool SeqExpr::contains_splice() const { return root_->has_splice; }

std::string to_string(const SeqClass& cls) {
  switch (cls.tag) {
    case SeqClass::Tag::constant: return "constant";
    case SeqClass::Tag::periodic: return "periodic(" + std::to_string(cls.period) + ")";
    case SeqClass::Tag::general: return "general";
  }
  return "general";
}

namespace {

bool shift_invariant(const SeqExpr& e, Index shift, Index from, Index to) {
  for (Index n = from; n < to; ++n) {
    if (e.eval(n) != e.eval(n + shift)) return false;
  }
  return true;
}

SeqClass from_period(Index p) {
  if (p == 1) return {SeqClass::Tag::constant, 1};
  return {SeqClass::Tag::periodic, p};
}

}  // namespace

SeqClass classify(const SeqExpr& expr, Index probe_len) {
  if (probe_len < 4) throw std::invalid_argument("classify: probe_len must be >= 4");
  try {
    if (auto p = expr.structural_period()) {
      // A structural period may not be minimal (per(1,1), alt(n)*alt(n)).
      for (Index d = 1; d < *p; ++d) {
        if (*p % d == 0 && shift_invariant(expr, d, 0, *p)) return from_period(d);
      }
      return from_period(*p);
    }
    if (expr.contains_splice()) return {};
    if (shift_invariant(expr, 1, 0, probe_len - 1)) return from_period(1);
    if (expr.probe_periodic_forbidden()) return {};
    for (Index p = 2; p <= probe_len / 4; ++p) {
      if (shift_invariant(expr, p, 0, probe_len - p)) return from_period(p);
    }
  } catch (const EvalError&) {
    return {};
  }
  return {};
}

ValueRange bounds_on_window(const SeqExpr& expr, Index n0, Index n1) {
  if (n0 > n1) throw std::invalid_argument("bounds_on_window: n0 > n1");
  ValueRange range{expr.eval(n0), expr.eval(n0)};
  for (Index n = n0 + 1; n <= n1; ++n) {
    const double v = expr.eval(n);
    range.inf = std::min(range.inf, v);
    range.sup = std::max(range.sup, v);
  }
  return range;
}

DelaySpec DelaySpec::constant(Index lag) {
  if (lag < 0) throw std::invalid_argument("DelaySpec: negative lag " + std::to_string(lag));
  return DelaySpec(std::vector<Index>{lag});
}

DelaySpec DelaySpec::periodic(std::vector<Index> lags) {
  if (lags.empty()) throw std::invalid_argument("DelaySpec: empty lag table");
  for (Index lag : lags) {
    if (lag < 0) throw std::invalid_argument("DelaySpec: negative lag " + std::to_string(lag));
  }
  return DelaySpec(std::move(lags));
}

Index DelaySpec::lag_at(Index n) const {
  const Index p = period();
  return lags_[static_cast<std::size_t>(((n % p) + p) % p)];
}

Index DelaySpec::max_lag() const { return *std::max_element(lags_.begin(), lags_.end()); }
Index DelaySpec::min_lag() const { return *std::min_element(lags_.begin(), lags_.end()); }

bool DelaySpec::is_constant() const {
  return std::all_of(lags_.begin(), lags_.end(), [&](Index l) { return l == lags_.front(); });
}

std::string DelaySpec::to_string() const {
  if (lags_.size() == 1) return std::to_string(lags_.front());
  std::string out = "per(";
  for (std::size_t i = 0; i < lags_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(lags_[i]);
  }
  return out + ")";
}

Index lcm_period(Index a, Index b) { return std::lcm(a, b); }

std::string format_double(double value) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

}  // namespace ddestab
