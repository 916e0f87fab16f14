#include "tau/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>
#include <utility>

#include "tau/error.hpp"

namespace tau {

struct Expr::Node {
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Ln } op = Op::Const;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(double x) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return x;
      case Op::Neg: return -lhs->eval(x);
      case Op::Add: return lhs->eval(x) + rhs->eval(x);
      case Op::Sub: return lhs->eval(x) - rhs->eval(x);
      case Op::Mul: return lhs->eval(x) * rhs->eval(x);
      case Op::Div: return lhs->eval(x) / rhs->eval(x);
      case Op::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
      case Op::Exp: return std::exp(lhs->eval(x));
      case Op::Ln: return std::log(lhs->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  n->value = v;
  return n;
}

class Parser {
 public:
  Parser(const std::string& s, const Expr::Constants& c) : s_(s), consts_(c) {}

  NodePtr run() {
    auto n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::ConfigError, "expression \"" + s_ + "\" at " + std::to_string(pos_) + ": " + why);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto n = term();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, term());
      else if (accept('-')) n = make(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = atom();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (accept('(')) {
      auto n = expr();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "exp" || name == "ln") {
        if (!accept('(')) fail(name + " needs '('");
        auto arg = expr();
        if (!accept(')')) fail("missing ')'");
        return make(name == "exp" ? Op::Exp : Op::Ln, arg);
      }
      if (name == "x") return make(Op::Var);
      const auto it = consts_.find(name);
      if (it == consts_.end()) {
        pos_ = start;
        fail("unknown name '" + name + "'");
      }
      return make(Op::Const, nullptr, nullptr, it->second);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  // digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
  NodePtr number() {
    const auto start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      auto save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) digits();
      else pos_ = save;
    }
    const std::string lex = s_.substr(start, pos_ - start);
    if (lex == ".") fail("lone '.'");
    double v = 0.0;
    const auto res = std::from_chars(lex.data(), lex.data() + lex.size(), v);
    if (res.ec != std::errc() || res.ptr != lex.data() + lex.size()) fail("bad number '" + lex + "'");
    return make(Op::Const, nullptr, nullptr, v);
  }

  const std::string& s_;
  const Expr::Constants& consts_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text, const Constants& constants) {
  Expr e;
  e.root_ = Parser(text, constants).run();
  e.text_ = text;
  return e;
}

double Expr::operator()(double x) const { return root_->eval(x); }

}  // namespace tau
