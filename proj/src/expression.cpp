#include "fpl/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "fpl/grid.hpp"

namespace fpl {

struct Expression::Node {
  enum class Kind { Number, Variable, Negate, Binary, Call } kind = Kind::Number;
  double value = 0.0;
  char op = 0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double x) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::Variable: return x;
      case Kind::Negate: return -args[0]->eval(x);
      case Kind::Binary: {
        const double l = args[0]->eval(x), r = args[1]->eval(x);
        switch (op) {
          case '+': return l + r;
          case '-': return l - r;
          case '*': return l * r;
          case '/': return l / r;
          default: return std::pow(l, r);
        }
      }
      case Kind::Call: {
        const double a = args[0]->eval(x);
        if (name == "sin") return std::sin(a);
        if (name == "cos") return std::cos(a);
        if (name == "tan") return std::tan(a);
        if (name == "exp") return std::exp(a);
        if (name == "log") return std::log(a);
        if (name == "sqrt") return std::sqrt(a);
        if (name == "abs") return std::abs(a);
        if (name == "step") return a >= 0.0 ? 1.0 : 0.0;
        const double b = args[1]->eval(x);
        if (name == "min") return std::min(a, b);
        if (name == "max") return std::max(a, b);
        return std::pow(a, b);
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

int arity(const std::string& name) {
  static const char* unary[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "step"};
  for (const char* u : unary)
    if (name == u) return 1;
  if (name == "min" || name == "max" || name == "pow") return 2;
  return 0;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr root = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression '" + s_ + "': " + what + " at column " +
                      std::to_string(pos_ + 1));
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

  static NodePtr binary(char op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->args = {std::move(l), std::move(r)};
    return n;
  }

  NodePtr sum() {
    NodePtr left = product();
    for (;;) {
      if (accept('+')) left = binary('+', left, product());
      else if (accept('-')) left = binary('-', left, product());
      else return left;
    }
  }

  NodePtr product() {
    NodePtr left = unary();
    for (;;) {
      if (accept('*')) left = binary('*', left, unary());
      else if (accept('/')) left = binary('/', left, unary());
      else return left;
    }
  }

  // Unary minus binds looser than ^, so -x^2 is -(x^2).
  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Negate;
      n->args = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary('^', base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr inner = sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      auto n = std::make_shared<Node>();
      if (name == "x") {
        n->kind = Node::Kind::Variable;
        return n;
      }
      if (name == "pi") {
        n->value = M_PI;
        return n;
      }
      if (name == "e") {
        n->value = M_E;
        return n;
      }
      const int k = arity(name);
      if (k == 0) {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      if (!accept('(')) fail("expected '(' after " + name);
      n->kind = Node::Kind::Call;
      n->name = name;
      n->args.push_back(sum());
      for (int i = 1; i < k; ++i) {
        if (!accept(',')) fail(name + " takes " + std::to_string(k) + " arguments");
        n->args.push_back(sum());
      }
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text_).parse()) {}
Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::operator()(double x) const { return root_->eval(x); }

}  // namespace fpl
