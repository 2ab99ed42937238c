#pragma once

// Chart-definition expression language.
//
// Grammar (whitespace between tokens is ignored):
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := '-' unary | power
//   power   := primary [ '^' unary ]          (right-associative)
//   primary := number | variable | function '(' expr ')' | '(' expr ')'
//   number  := digits [ '.' digits ] [ ('e'|'E') ['+'|'-'] digits ]
//            | '.' digits [ exponent ]
//   function:= sin | cos | tan | sinh | cosh | tanh | exp | ln | sqrt | abs
//
// so '^' binds tighter than unary minus ("-u^2" is -(u^2)), and unary minus
// binds tighter than '*' and '/'. Function application always needs
// parentheses. Identifiers are ASCII letters, digits and '_' starting with a
// letter; every identifier must be a declared variable or a function name.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "hypercurv/error.hpp"
#include "hypercurv/linalg.hpp"

namespace hypercurv {

// ---------------------------------------------------------------------------
// Tokens

struct Token {
  enum class Kind { number, identifier, op, left_paren, right_paren, comma };

  Kind kind;
  std::string lexeme;
  std::size_t position = 0;  // byte offset into the source
  double number = 0.0;       // set for Kind::number
};

inline std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = source.size();
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };

  while (i < n) {
    const char ch = source[i];
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(ch) || (ch == '.' && i + 1 < n && is_digit(source[i + 1]))) {
      while (i < n && is_digit(source[i])) ++i;
      if (i < n && source[i] == '.') {
        ++i;
        while (i < n && is_digit(source[i])) ++i;
      }
      if (i < n && (source[i] == 'e' || source[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (source[j] == '+' || source[j] == '-')) ++j;
        if (j >= n || !is_digit(source[j])) throw LexError("malformed exponent", i);
        while (j < n && is_digit(source[j])) ++j;
        i = j;
      }
      Token t{Token::Kind::number, std::string(source.substr(start, i - start)), start, 0.0};
      // from_chars rejects a leading '.', so parse with a "0" prefix in that case
      std::string text = t.lexeme.front() == '.' ? "0" + t.lexeme : t.lexeme;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t.number);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw LexError("invalid numeric literal '" + t.lexeme + "'", start);
      }
      out.push_back(std::move(t));
      continue;
    }
    if (is_alpha(ch)) {
      while (i < n && (is_alpha(source[i]) || is_digit(source[i]) || source[i] == '_')) ++i;
      out.push_back({Token::Kind::identifier, std::string(source.substr(start, i - start)), start});
      continue;
    }
    switch (ch) {
      case '+':
      case '-':
      case '*':
      case '/':
      case '^':
        out.push_back({Token::Kind::op, std::string(1, ch), start});
        break;
      case '(':
        out.push_back({Token::Kind::left_paren, "(", start});
        break;
      case ')':
        out.push_back({Token::Kind::right_paren, ")", start});
        break;
      case ',':
        out.push_back({Token::Kind::comma, ",", start});
        break;
      default:
        throw LexError(std::string("unexpected character '") + ch + "'", start);
    }
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expression trees

enum class UnaryOp { neg, sin, cos, tan, sinh, cosh, tanh, exp, ln, sqrt, abs };
enum class BinaryOp { add, sub, mul, div, pow };

inline constexpr std::array<std::pair<std::string_view, UnaryOp>, 10> kFunctions{{
    {"sin", UnaryOp::sin},
    {"cos", UnaryOp::cos},
    {"tan", UnaryOp::tan},
    {"sinh", UnaryOp::sinh},
    {"cosh", UnaryOp::cosh},
    {"tanh", UnaryOp::tanh},
    {"exp", UnaryOp::exp},
    {"ln", UnaryOp::ln},
    {"sqrt", UnaryOp::sqrt},
    {"abs", UnaryOp::abs},
}};

inline std::optional<UnaryOp> function_named(std::string_view name) {
  for (const auto& [fname, op] : kFunctions)
    if (fname == name) return op;
  return std::nullopt;
}

inline std::string_view function_name(UnaryOp op) {
  for (const auto& [fname, fop] : kFunctions)
    if (fop == op) return fname;
  return "-";
}

inline char operator_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
    case BinaryOp::pow: return '^';
  }
  return '?';
}

/// Immutable expression tree over `arity` variables. Copies share nodes.
class Expr {
public:
  enum class Kind { constant, variable, unary, binary };

  struct Node {
    Kind kind = Kind::constant;
    double value = 0.0;
    std::size_t variable = 0;
    UnaryOp unary_op = UnaryOp::neg;
    BinaryOp binary_op = BinaryOp::add;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expr() = default;

  static Expr constant(double v, std::size_t arity) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::constant;
    node->value = v;
    return Expr(std::move(node), arity);
  }
  static Expr variable(std::size_t index, std::size_t arity) {
    if (index >= arity) throw InvalidArgumentError("variable index out of range");
    auto node = std::make_shared<Node>();
    node->kind = Kind::variable;
    node->variable = index;
    return Expr(std::move(node), arity);
  }
  static Expr unary(UnaryOp op, const Expr& operand) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::unary;
    node->unary_op = op;
    node->lhs = operand.root_;
    return Expr(std::move(node), operand.arity_);
  }
  static Expr binary(BinaryOp op, const Expr& a, const Expr& b) {
    if (a.arity_ != b.arity_) throw InvalidArgumentError("operand arity mismatch");
    auto node = std::make_shared<Node>();
    node->kind = Kind::binary;
    node->binary_op = op;
    node->lhs = a.root_;
    node->rhs = b.root_;
    return Expr(std::move(node), a.arity_);
  }

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  std::size_t arity() const { return arity_; }
  bool empty() const { return root_ == nullptr; }

  Expr(NodePtr root, std::size_t arity) : root_(std::move(root)), arity_(arity) {}

private:
  NodePtr root_;
  std::size_t arity_ = 0;
};

inline bool structurally_equal(const Expr::Node& a, const Expr::Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::constant: return a.value == b.value;
    case Expr::Kind::variable: return a.variable == b.variable;
    case Expr::Kind::unary:
      return a.unary_op == b.unary_op && structurally_equal(*a.lhs, *b.lhs);
    case Expr::Kind::binary:
      return a.binary_op == b.binary_op && structurally_equal(*a.lhs, *b.lhs) &&
             structurally_equal(*a.rhs, *b.rhs);
  }
  return false;
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
  return a.arity() == b.arity() && structurally_equal(a.root(), b.root());
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

namespace detail {
inline void print(const Expr::Node& node, std::span<const std::string> names, std::string& out) {
  switch (node.kind) {
    case Expr::Kind::constant:
      // negative constants only arise from programmatic construction
      if (std::signbit(node.value)) {
        out += "(" + format_real(node.value) + ")";
      } else {
        out += format_real(node.value);
      }
      return;
    case Expr::Kind::variable:
      out += node.variable < names.size() ? names[node.variable]
                                          : "x" + std::to_string(node.variable + 1);
      return;
    case Expr::Kind::unary:
      if (node.unary_op == UnaryOp::neg) {
        out += "(-";
        print(*node.lhs, names, out);
        out += ")";
      } else {
        out += function_name(node.unary_op);
        out += "(";
        print(*node.lhs, names, out);
        out += ")";
      }
      return;
    case Expr::Kind::binary:
      out += "(";
      print(*node.lhs, names, out);
      out += operator_symbol(node.binary_op);
      print(*node.rhs, names, out);
      out += ")";
      return;
  }
}
}  // namespace detail

/// Fully parenthesized rendering; parse(to_string(e)) rebuilds the same tree
/// for trees whose constants are non-negative (which is every parsed tree).
inline std::string to_string(const Expr& e, std::span<const std::string> names = {}) {
  std::string out;
  if (!e.empty()) detail::print(e.root(), names, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class Parser {
public:
  Parser(std::string_view source, std::span<const std::string> variables)
      : tokens_(tokenize(source)), variables_(variables), end_(source.size()) {}

  Expr parse() {
    Expr e = expr();
    if (pos_ < tokens_.size()) {
      throw ParseError("unexpected token '" + tokens_[pos_].lexeme + "'", tokens_[pos_].position);
    }
    return e;
  }

private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }
  std::size_t here() const { return pos_ < tokens_.size() ? tokens_[pos_].position : end_; }
  bool peek_op(char c) const {
    const Token* t = peek();
    return t && t->kind == Token::Kind::op && t->lexeme[0] == c;
  }

  Expr expr() {
    Expr lhs = term();
    while (peek_op('+') || peek_op('-')) {
      const BinaryOp op = tokens_[pos_++].lexeme[0] == '+' ? BinaryOp::add : BinaryOp::sub;
      lhs = Expr::binary(op, lhs, term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (peek_op('*') || peek_op('/')) {
      const BinaryOp op = tokens_[pos_++].lexeme[0] == '*' ? BinaryOp::mul : BinaryOp::div;
      lhs = Expr::binary(op, lhs, unary());
    }
    return lhs;
  }

  Expr unary() {
    if (peek_op('-')) {
      ++pos_;
      return Expr::unary(UnaryOp::neg, unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (peek_op('^')) {
      ++pos_;
      return Expr::binary(BinaryOp::pow, base, unary());
    }
    return base;
  }

  Expr primary() {
    const Token* t = peek();
    if (!t) throw ParseError("unexpected end of input", end_);
    switch (t->kind) {
      case Token::Kind::number:
        ++pos_;
        return Expr::constant(t->number, variables_.size());
      case Token::Kind::identifier: {
        ++pos_;
        for (std::size_t i = 0; i < variables_.size(); ++i) {
          if (variables_[i] == t->lexeme) return Expr::variable(i, variables_.size());
        }
        if (auto fn = function_named(t->lexeme)) {
          const Token* open = peek();
          if (!open || open->kind != Token::Kind::left_paren) {
            throw ParseError("function '" + t->lexeme + "' requires parentheses", here());
          }
          ++pos_;
          Expr arg = expr();
          expect_right_paren();
          return Expr::unary(*fn, arg);
        }
        throw UnknownIdentifierError(t->lexeme, t->position);
      }
      case Token::Kind::left_paren: {
        ++pos_;
        Expr inner = expr();
        expect_right_paren();
        return inner;
      }
      default:
        throw ParseError("unexpected token '" + t->lexeme + "'", t->position);
    }
  }

  void expect_right_paren() {
    const Token* t = peek();
    if (!t || t->kind != Token::Kind::right_paren) throw ParseError("expected ')'", here());
    ++pos_;
  }

  std::vector<Token> tokens_;
  std::span<const std::string> variables_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view source, std::span<const std::string> variables) {
  return detail::Parser(source, variables).parse();
}

inline Expr parse(std::string_view source, std::initializer_list<std::string> variables) {
  const std::vector<std::string> vars(variables);
  return parse(source, std::span<const std::string>(vars));
}

// ---------------------------------------------------------------------------
// Second-order jets

/// Value, gradient and Hessian of a scalar function at a point.
struct Jet2 {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;

  static Jet2 constant(double v, Eigen::Index n) {
    return {v, Vector::Zero(n), Matrix::Zero(n, n)};
  }
  static Jet2 variable(double v, Eigen::Index index, Eigen::Index n) {
    Jet2 j = constant(v, n);
    j.gradient(index) = 1.0;
    return j;
  }
  Eigen::Index dimension() const { return gradient.size(); }
};

namespace detail {

inline double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
  return v;
}

/// f∘a given f(a), f'(a), f''(a).
inline Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
  const Eigen::Index n = a.dimension();
  Jet2 r{f0, f1 * a.gradient, Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = f1 * a.hessian(i, j) + f2 * a.gradient(i) * a.gradient(j);
      r.hessian(i, j) = v;
      r.hessian(j, i) = v;
    }
  }
  return r;
}

/// F(a, b) given its value and partials up to second order.
struct Partials2 {
  double f, fa, fb, faa, fab, fbb;
};

inline Jet2 combine(const Jet2& a, const Jet2& b, const Partials2& p) {
  const Eigen::Index n = a.dimension();
  Jet2 r{p.f, p.fa * a.gradient + p.fb * b.gradient, Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double ai = a.gradient(i), aj = a.gradient(j);
      const double bi = b.gradient(i), bj = b.gradient(j);
      const double v = p.fa * a.hessian(i, j) + p.fb * b.hessian(i, j) + p.faa * ai * aj +
                       p.fab * (ai * bj + bi * aj) + p.fbb * bi * bj;
      r.hessian(i, j) = v;
      r.hessian(j, i) = v;
    }
  }
  return r;
}

inline bool is_integer(double p) { return std::isfinite(p) && std::nearbyint(p) == p; }

inline bool is_constant(const Jet2& j) {
  return j.gradient.isZero(0.0) && j.hessian.isZero(0.0);
}

// Value rules shared by the scalar and jet evaluators so that both produce
// bit-identical values.

inline double unary_value(UnaryOp op, double x) {
  switch (op) {
    case UnaryOp::neg: return -x;
    case UnaryOp::sin: return std::sin(x);
    case UnaryOp::cos: return std::cos(x);
    case UnaryOp::tan:
      if (std::cos(x) == 0.0) throw DomainError("tan at a pole");
      return checked(std::tan(x), "tan");
    case UnaryOp::sinh: return checked(std::sinh(x), "sinh");
    case UnaryOp::cosh: return checked(std::cosh(x), "cosh");
    case UnaryOp::tanh: return std::tanh(x);
    case UnaryOp::exp: return checked(std::exp(x), "exp");
    case UnaryOp::ln:
      if (!(x > 0.0)) throw DomainError("ln of non-positive argument");
      return std::log(x);
    case UnaryOp::sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(x);
    case UnaryOp::abs: return std::abs(x);
  }
  return x;
}

inline double binary_value(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return checked(a + b, "+");
    case BinaryOp::sub: return checked(a - b, "-");
    case BinaryOp::mul: return checked(a * b, "*");
    case BinaryOp::div:
      if (b == 0.0) throw DomainError("division by zero");
      return checked(a / b, "/");
    case BinaryOp::pow:
      if (a == 0.0 && b < 0.0) throw DomainError("zero raised to a negative power");
      if (a < 0.0 && !is_integer(b)) throw DomainError("negative base with non-integer exponent");
      return checked(std::pow(a, b), "^");
  }
  return 0.0;
}

inline Jet2 unary_jet(UnaryOp op, const Jet2& a) {
  const double x = a.value;
  const double f = unary_value(op, x);
  switch (op) {
    case UnaryOp::neg: {
      Jet2 r{f, -a.gradient, -a.hessian};
      return r;
    }
    case UnaryOp::sin: return chain(a, f, std::cos(x), -f);
    case UnaryOp::cos: return chain(a, f, -std::sin(x), -f);
    case UnaryOp::tan: {
      const double sec2 = 1.0 + f * f;
      return chain(a, f, sec2, 2.0 * f * sec2);
    }
    case UnaryOp::sinh: return chain(a, f, std::cosh(x), f);
    case UnaryOp::cosh: return chain(a, f, std::sinh(x), f);
    case UnaryOp::tanh: {
      const double sech2 = 1.0 - f * f;
      return chain(a, f, sech2, -2.0 * f * sech2);
    }
    case UnaryOp::exp: return chain(a, f, f, f);
    case UnaryOp::ln: return chain(a, f, 1.0 / x, -1.0 / (x * x));
    case UnaryOp::sqrt:
      if (x == 0.0) throw NonSmoothError("sqrt is not differentiable at 0");
      return chain(a, f, 0.5 / f, -0.25 / (f * x));
    case UnaryOp::abs:
      if (x == 0.0) throw NonSmoothError("abs is not differentiable at 0");
      return chain(a, f, x > 0.0 ? 1.0 : -1.0, 0.0);
  }
  return a;
}

inline Jet2 binary_jet(BinaryOp op, const Jet2& a, const Jet2& b) {
  const double x = a.value;
  const double y = b.value;
  const double f = binary_value(op, x, y);
  switch (op) {
    case BinaryOp::add: {
      Jet2 r{f, a.gradient + b.gradient, a.hessian + b.hessian};
      return r;
    }
    case BinaryOp::sub: {
      Jet2 r{f, a.gradient - b.gradient, a.hessian - b.hessian};
      return r;
    }
    case BinaryOp::mul: return combine(a, b, {f, y, x, 0.0, 1.0, 0.0});
    case BinaryOp::div: {
      const double inv = 1.0 / y;
      const double inv2 = inv * inv;
      return combine(a, b, {f, inv, -x * inv2, 0.0, -inv2, 2.0 * x * inv2 * inv});
    }
    case BinaryOp::pow: {
      if (is_constant(b)) {
        const double p = y;
        if (x == 0.0 && !is_integer(p) && p < 2.0) {
          throw NonSmoothError("power with non-integer exponent below 2 is not twice differentiable at 0");
        }
        const double d1 = p == 0.0 ? 0.0 : p * std::pow(x, p - 1.0);
        const double d2 = (p == 0.0 || p == 1.0) ? 0.0 : p * (p - 1.0) * std::pow(x, p - 2.0);
        return chain(a, f, checked(d1, "^"), checked(d2, "^"));
      }
      if (!(x > 0.0)) throw DomainError("variable exponent requires a positive base");
      const double lx = std::log(x);
      const double fx = y * std::pow(x, y - 1.0);
      const double fy = f * lx;
      const double fxx = y * (y - 1.0) * std::pow(x, y - 2.0);
      const double fxy = std::pow(x, y - 1.0) * (1.0 + y * lx);
      const double fyy = f * lx * lx;
      return combine(a, b, {f, fx, fy, fxx, fxy, fyy});
    }
  }
  return a;
}

inline Jet2 eval_jet(const Expr::Node& node, std::span<const double> point) {
  const auto n = static_cast<Eigen::Index>(point.size());
  switch (node.kind) {
    case Expr::Kind::constant: return Jet2::constant(node.value, n);
    case Expr::Kind::variable:
      return Jet2::variable(point[node.variable], static_cast<Eigen::Index>(node.variable), n);
    case Expr::Kind::unary: return unary_jet(node.unary_op, eval_jet(*node.lhs, point));
    case Expr::Kind::binary:
      return binary_jet(node.binary_op, eval_jet(*node.lhs, point), eval_jet(*node.rhs, point));
  }
  return Jet2::constant(0.0, n);
}

inline double eval_scalar(const Expr::Node& node, std::span<const double> point) {
  switch (node.kind) {
    case Expr::Kind::constant: return node.value;
    case Expr::Kind::variable: return point[node.variable];
    case Expr::Kind::unary: return unary_value(node.unary_op, eval_scalar(*node.lhs, point));
    case Expr::Kind::binary:
      return binary_value(node.binary_op, eval_scalar(*node.lhs, point),
                          eval_scalar(*node.rhs, point));
  }
  return 0.0;
}

inline void check_arity(const Expr& e, std::size_t n) {
  if (e.empty()) throw InvalidArgumentError("empty expression");
  if (n != e.arity()) {
    throw InvalidArgumentError("point has " + std::to_string(n) + " coordinates, expression expects " +
                               std::to_string(e.arity()));
  }
}

}  // namespace detail

/// Value, gradient and Hessian at `point`, propagated exactly through the tree.
inline Jet2 eval_jet(const Expr& e, std::span<const double> point) {
  detail::check_arity(e, point.size());
  return detail::eval_jet(e.root(), point);
}

inline double eval_scalar(const Expr& e, std::span<const double> point) {
  detail::check_arity(e, point.size());
  return detail::eval_scalar(e.root(), point);
}

}  // namespace hypercurv
