#include "apmarkov/time_function.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <numbers>

namespace apmarkov {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt, Abs };

struct ExprNode {
  Op op = Op::Const;
  double value = 0.0;
  std::shared_ptr<const ExprNode> a;
  std::shared_ptr<const ExprNode> b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_var() {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

// Constructors fold the trivial 0/1 cases so derivative trees stay small.
NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  if (a->op == Op::Const && b->op == Op::Const) {
    switch (op) {
      case Op::Add: return make_const(a->value + b->value);
      case Op::Sub: return make_const(a->value - b->value);
      case Op::Mul: return make_const(a->value * b->value);
      case Op::Div:
        if (b->value != 0.0) return make_const(a->value / b->value);
        break;
      default: break;
    }
  }
  switch (op) {
    case Op::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Sub:
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Div:
      if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Pow:
      if (is_const(b, 1.0)) return a;
      if (is_const(b, 0.0)) return make_const(1.0);
      break;
    default: break;
  }
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_unary(Op op, NodePtr a) {
  if (a->op == Op::Const) {
    const double v = a->value;
    switch (op) {
      case Op::Neg: return make_const(-v);
      case Op::Sin: return make_const(std::sin(v));
      case Op::Cos: return make_const(std::cos(v));
      case Op::Exp: return make_const(std::exp(v));
      default: break;
    }
  }
  if (op == Op::Neg && a->op == Op::Neg) return a->a;
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

double eval(const ExprNode& n, double t) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return t;
    case Op::Add: return eval(*n.a, t) + eval(*n.b, t);
    case Op::Sub: return eval(*n.a, t) - eval(*n.b, t);
    case Op::Mul: return eval(*n.a, t) * eval(*n.b, t);
    case Op::Div: return eval(*n.a, t) / eval(*n.b, t);
    case Op::Neg: return -eval(*n.a, t);
    case Op::Pow: return std::pow(eval(*n.a, t), eval(*n.b, t));
    case Op::Sin: return std::sin(eval(*n.a, t));
    case Op::Cos: return std::cos(eval(*n.a, t));
    case Op::Exp: return std::exp(eval(*n.a, t));
    case Op::Log: return std::log(eval(*n.a, t));
    case Op::Sqrt: return std::sqrt(eval(*n.a, t));
    case Op::Abs: return std::fabs(eval(*n.a, t));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

NodePtr differentiate(const NodePtr& n) {
  const auto& a = n->a;
  const auto& b = n->b;
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Var: return make_const(1.0);
    case Op::Add: return make_binary(Op::Add, differentiate(a), differentiate(b));
    case Op::Sub: return make_binary(Op::Sub, differentiate(a), differentiate(b));
    case Op::Mul:
      return make_binary(Op::Add, make_binary(Op::Mul, differentiate(a), b),
                         make_binary(Op::Mul, a, differentiate(b)));
    case Op::Div: {
      // (a'b - ab') / b^2
      auto num = make_binary(Op::Sub, make_binary(Op::Mul, differentiate(a), b),
                             make_binary(Op::Mul, a, differentiate(b)));
      return make_binary(Op::Div, num, make_binary(Op::Mul, b, b));
    }
    case Op::Neg: return make_unary(Op::Neg, differentiate(a));
    case Op::Pow: {
      if (b->op != Op::Const) {
        throw DerivativeError("derivative of pow with a non-constant exponent is not supported");
      }
      const double k = b->value;
      auto outer = make_binary(Op::Mul, make_const(k), make_binary(Op::Pow, a, make_const(k - 1.0)));
      return make_binary(Op::Mul, outer, differentiate(a));
    }
    case Op::Sin: return make_binary(Op::Mul, make_unary(Op::Cos, a), differentiate(a));
    case Op::Cos:
      return make_unary(Op::Neg, make_binary(Op::Mul, make_unary(Op::Sin, a), differentiate(a)));
    case Op::Exp: return make_binary(Op::Mul, n, differentiate(a));
    case Op::Log: return make_binary(Op::Div, differentiate(a), a);
    case Op::Sqrt:
      return make_binary(Op::Div, differentiate(a), make_binary(Op::Mul, make_const(2.0), n));
    case Op::Abs: throw DerivativeError("abs() has no symbolic derivative");
  }
  throw DerivativeError("unknown expression node");
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), end);
  // Keep the literal a plain decimal so the grammar accepts it.
  if (s == "inf" || s == "-inf" || s == "nan") return "(" + s + ")";
  return s;
}

const char* func_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    default: return "";
  }
}

void print(const ExprNode& n, std::string& out) {
  switch (n.op) {
    case Op::Const:
      if (n.value < 0) {
        out += "(" + format_number(n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    case Op::Var: out += "t"; return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: {
      const char sym = n.op == Op::Add   ? '+'
                       : n.op == Op::Sub ? '-'
                       : n.op == Op::Mul ? '*'
                       : n.op == Op::Div ? '/'
                                         : '^';
      out += "(";
      print(*n.a, out);
      out += sym;
      print(*n.b, out);
      out += ")";
      return;
    }
    case Op::Neg:
      out += "(-";
      print(*n.a, out);
      out += ")";
      return;
    default:
      out += func_name(n.op);
      out += "(";
      print(*n.a, out);
      out += ")";
      return;
  }
}

bool contains_var(const ExprNode& n) {
  if (n.op == Op::Var) return true;
  if (n.a && contains_var(*n.a)) return true;
  if (n.b && contains_var(*n.b)) return true;
  return false;
}

// Recursive-descent parser; grammar documented in docs/expression_grammar.md.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto n = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression parse error at offset " + std::to_string(pos_) + ": " + msg +
                         " in '" + std::string(text_) + "'",
                     pos_);
  }

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
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_binary(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_binary(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make_binary(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
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
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return make_const(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view id = text_.substr(start, pos_ - start);
    if (id == "t" || id == "x") return make_var();
    if (id == "pi") return make_const(std::numbers::pi);
    if (id == "inf") return make_const(std::numeric_limits<double>::infinity());
    if (id == "nan") return make_const(std::numeric_limits<double>::quiet_NaN());

    static constexpr std::array<std::pair<std::string_view, Op>, 6> unary_funcs{{
        {"sin", Op::Sin},
        {"cos", Op::Cos},
        {"exp", Op::Exp},
        {"log", Op::Log},
        {"sqrt", Op::Sqrt},
        {"abs", Op::Abs},
    }};
    for (const auto& [name, op] : unary_funcs) {
      if (id == name) {
        expect('(');
        auto arg = expr();
        expect(')');
        return make_unary(op, arg);
      }
    }
    if (id == "pow") {
      expect('(');
      auto base = expr();
      expect(',');
      auto exponent = expr();
      expect(')');
      return make_binary(Op::Pow, base, exponent);
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(id) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

TimeFunction::TimeFunction() : TimeFunction(make_const(0.0)) {}

TimeFunction::TimeFunction(std::shared_ptr<const ExprNode> root, Declarations decl)
    : root_(std::move(root)), decl_(decl) {}

TimeFunction TimeFunction::parse(std::string_view text, Declarations decl) {
  return TimeFunction(Parser(text).parse(), decl);
}

TimeFunction TimeFunction::constant(double c) {
  return TimeFunction(make_const(c), Declarations{c, c, std::nullopt});
}

TimeFunction TimeFunction::variable() { return TimeFunction(make_var()); }

double TimeFunction::operator()(double t) const { return eval(*root_, t); }

TimeFunction TimeFunction::derivative() const { return TimeFunction(differentiate(root_)); }

double TimeFunction::derivative(double t, int order) const {
  switch (order) {
    case 1: return eval(*differentiate(root_), t);
    case 2: return eval(*differentiate(differentiate(root_)), t);
    default: throw DerivativeError("derivative order must be 1 or 2, got " + std::to_string(order));
  }
}

std::string TimeFunction::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

TimeFunction TimeFunction::with_declarations(Declarations decl) const {
  return TimeFunction(root_, decl);
}

bool TimeFunction::is_constant() const { return !contains_var(*root_); }

TimeFunction operator+(const TimeFunction& a, const TimeFunction& b) {
  return TimeFunction(make_binary(Op::Add, a.root_, b.root_));
}
TimeFunction operator-(const TimeFunction& a, const TimeFunction& b) {
  return TimeFunction(make_binary(Op::Sub, a.root_, b.root_));
}
TimeFunction operator*(const TimeFunction& a, const TimeFunction& b) {
  return TimeFunction(make_binary(Op::Mul, a.root_, b.root_));
}
TimeFunction operator/(const TimeFunction& a, const TimeFunction& b) {
  return TimeFunction(make_binary(Op::Div, a.root_, b.root_));
}

TimeFunction sin(const TimeFunction& f) { return TimeFunction(make_unary(Op::Sin, f.root_)); }
TimeFunction cos(const TimeFunction& f) { return TimeFunction(make_unary(Op::Cos, f.root_)); }
TimeFunction exp(const TimeFunction& f) { return TimeFunction(make_unary(Op::Exp, f.root_)); }
TimeFunction pow(const TimeFunction& base, double exponent) {
  return TimeFunction(make_binary(Op::Pow, base.root_, make_const(exponent)));
}

DeclarationReport verify_declarations(const TimeFunction& f, double t_max, std::size_t n_points) {
  DeclarationReport r;
  const auto& d = f.declarations();
  r.observed_min = std::numeric_limits<double>::infinity();
  r.observed_max = -std::numeric_limits<double>::infinity();
  const std::size_t n = std::max<std::size_t>(n_points, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    const double v = f(t);
    r.observed_min = std::min(r.observed_min, v);
    r.observed_max = std::max(r.observed_max, v);
    if (!(v >= d.lower && v <= d.upper)) r.bounds_ok = false;
    if (d.period) {
      const double defect = std::fabs(f(t + *d.period) - v) / (1.0 + std::fabs(v));
      r.worst_period_defect = std::max(r.worst_period_defect, defect);
    }
  }
  r.period_ok = r.worst_period_defect <= 1e-12;
  return r;
}

}  // namespace apmarkov
