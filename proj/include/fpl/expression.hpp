#ifndef FPL_EXPRESSION_HPP_
#define FPL_EXPRESSION_HPP_

#include <memory>
#include <string>

namespace fpl {

/// A parsed scalar expression in one variable `x`.
///
/// Grammar: + - * / ^ (right-associative), unary minus, parentheses,
/// constants `pi` and `e`, and the functions sin cos tan exp log sqrt abs
/// step (Heaviside, step(0) = 1), min, max, pow.
class Expression {
 public:
  /// Throws ConfigError with the offending column on malformed input.
  explicit Expression(const std::string& text);
  ~Expression();
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  double operator()(double x) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace fpl

#endif  // FPL_EXPRESSION_HPP_
