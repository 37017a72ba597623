#include "shellhier/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "shellhier/errors.hpp"

namespace shellhier {

struct Expression::Node {
  enum class Kind { Number, U, V, X, Y, Z, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Number;
  double value = 0.0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, std::vector<NodePtr> args = {}, double value = 0.0, std::string fn = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->args = std::move(args);
  n->value = value;
  n->fn = std::move(fn);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::BadConfig,
                "expression '" + std::string(s_) + "': " + msg + " at offset " + std::to_string(pos_));
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
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Kind::Add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Node::Kind::Sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Kind::Mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Node::Kind::Div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character");
  }

  NodePtr number() {
    double value = 0.0;
    const char* begin = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), value);
    if (ec != std::errc()) fail("bad number");
    pos_ += static_cast<size_t>(ptr - begin);
    return make(Node::Kind::Number, {}, value);
  }

  NodePtr identifier() {
    const size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    if (accept('(')) {
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      if (!accept(')')) fail("expected ')'");
      static const char* unary_fns[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "atan"};
      bool known = false;
      for (const char* f : unary_fns) known = known || name == f;
      if (known && args.size() != 1) fail(name + " takes one argument");
      if (name == "pow") {
        if (args.size() != 2) fail("pow takes two arguments");
        return make(Node::Kind::Pow, std::move(args));
      }
      if (!known) fail("unknown function '" + name + "'");
      return make(Node::Kind::Call, std::move(args), 0.0, name);
    }
    if (name == "u") return make(Node::Kind::U);
    if (name == "v") return make(Node::Kind::V);
    if (name == "x") return make(Node::Kind::X);
    if (name == "y") return make(Node::Kind::Y);
    if (name == "z") return make(Node::Kind::Z);
    if (name == "pi") return make(Node::Kind::Number, {}, std::numbers::pi);
    if (name == "e") return make(Node::Kind::Number, {}, std::numbers::e);
    fail("unknown identifier '" + name + "'");
  }

  std::string_view s_;
  size_t pos_ = 0;
};

Jet call(const std::string& fn, const Jet& a) {
  if (fn == "sin") return sin(a);
  if (fn == "cos") return cos(a);
  if (fn == "tan") return tan(a);
  if (fn == "exp") return exp(a);
  if (fn == "log") return log(a);
  if (fn == "sqrt") return sqrt(a);
  if (fn == "sinh") return sinh(a);
  if (fn == "cosh") return cosh(a);
  return atan(a);
}

Jet eval_node(const Node& n, const Jet& u, const Jet& v, const std::array<Jet, 3>& x) {
  switch (n.kind) {
    case Node::Kind::Number: return Jet(n.value);
    case Node::Kind::U: return u;
    case Node::Kind::V: return v;
    case Node::Kind::X: return x[0];
    case Node::Kind::Y: return x[1];
    case Node::Kind::Z: return x[2];
    case Node::Kind::Neg: return Jet(0.0) - eval_node(*n.args[0], u, v, x);
    case Node::Kind::Add: return eval_node(*n.args[0], u, v, x) + eval_node(*n.args[1], u, v, x);
    case Node::Kind::Sub: return eval_node(*n.args[0], u, v, x) - eval_node(*n.args[1], u, v, x);
    case Node::Kind::Mul: return eval_node(*n.args[0], u, v, x) * eval_node(*n.args[1], u, v, x);
    case Node::Kind::Div: return eval_node(*n.args[0], u, v, x) / eval_node(*n.args[1], u, v, x);
    case Node::Kind::Pow: return pow(eval_node(*n.args[0], u, v, x), eval_node(*n.args[1], u, v, x));
    case Node::Kind::Call: return call(n.fn, eval_node(*n.args[0], u, v, x));
  }
  return Jet(0.0);
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.text_ = std::string(text);
  e.root_ = Parser(text).parse();
  return e;
}

Expression Expression::constant(double value) {
  Expression e;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  e.text_ = buf;
  e.root_ = make(Node::Kind::Number, {}, value);
  return e;
}

Jet Expression::eval(const Jet& u, const Jet& v, const std::array<Jet, 3>& position) const {
  if (!root_) return Jet(0.0);
  return eval_node(*root_, u, v, position);
}

double Expression::eval(double u, double v, const Vec3& position) const {
  return eval(Jet(u), Jet(v), {Jet(position[0]), Jet(position[1]), Jet(position[2])}).val;
}

bool Expression::is_zero() const {
  return !root_ || (root_->kind == Node::Kind::Number && root_->value == 0.0);
}

}  // namespace shellhier
