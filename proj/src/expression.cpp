#include "geodev/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "geodev/error.hpp"

namespace geodev {

struct Expression::Node {
  enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };
  Kind kind;
  double value = 0.0;
  int var = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(const Vec& x) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::Variable: return x[var];
      case Kind::Neg: return -lhs->eval(x);
      case Kind::Add: return lhs->eval(x) + rhs->eval(x);
      case Kind::Sub: return lhs->eval(x) - rhs->eval(x);
      case Kind::Mul: return lhs->eval(x) * rhs->eval(x);
      case Kind::Div: return lhs->eval(x) / rhs->eval(x);
      case Kind::Pow: {
        const double base = lhs->eval(x);
        const double ex = rhs->eval(x);
        // integer powers of negative bases are common in potentials (y^3)
        if (ex == std::round(ex) && std::abs(ex) < 64) {
          const int k = static_cast<int>(ex);
          double r = 1.0;
          for (int i = 0; i < std::abs(k); ++i) r *= base;
          return k < 0 ? 1.0 / r : r;
        }
        return std::pow(base, ex);
      }
      case Kind::Sin: return std::sin(lhs->eval(x));
      case Kind::Cos: return std::cos(lhs->eval(x));
      case Kind::Exp: return std::exp(lhs->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, int num_vars) : text_(text), num_vars_(num_vars) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::ConfigParse, "expression '" + std::string(text_) + "': " + what +
                                       " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Kind::Add, n, term());
      else if (accept('-')) n = make(Kind::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Kind::Mul, n, unary());
      else if (accept('/')) n = make(Kind::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(text_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("bad number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "sin" || word == "cos" || word == "exp") {
        if (!accept('(')) fail("expected '(' after " + std::string(word));
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(word == "sin" ? Kind::Sin : word == "cos" ? Kind::Cos : Kind::Exp, arg);
      }
      if (word.size() >= 2 && word[0] == 'x') {
        const int idx = std::atoi(std::string(word.substr(1)).c_str());
        if (idx < 1 || idx > num_vars_) fail("variable " + std::string(word) + " out of range");
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::Variable;
        n->var = idx - 1;
        return n;
      }
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  int num_vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, int num_vars) {
  Expression e;
  e.root_ = Parser(text, num_vars).parse();
  e.source_ = std::string(text);
  e.num_vars_ = num_vars;
  return e;
}

double Expression::operator()(const Vec& x) const {
  if (x.size() != num_vars_)
    throw Error(Errc::DimensionMismatch, "expression expects " + std::to_string(num_vars_) +
                                             " variables, got " + std::to_string(x.size()));
  return root_->eval(x);
}

}  // namespace geodev
