#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

// Arithmetic expressions in x1..x4 with the function set
// sin, cos, tan, atan, exp, abs and the constant pi.  Standard infix
// precedence, parentheses, unary minus, '^' for powers.

namespace lagphase {

class ExprError : public std::runtime_error {
 public:
  ExprError(const std::string& message, int position)
      : std::runtime_error(message + " (at column " +
                           std::to_string(position + 1) + ")"),
        position_(position) {}
  int position() const { return position_; }

 private:
  int position_;
};

class Expression {
 public:
  /// Parses the expression or throws ExprError with a column number.
  static Expression Parse(const std::string& text);

  ~Expression();
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  /// Evaluates at x; referencing a variable beyond x.size() throws
  /// std::invalid_argument.
  double Eval(const Eigen::VectorXd& x) const;

  /// Largest variable index referenced (1-based), 0 for constants.
  int max_variable() const;

  struct Node;  // parse-tree node, defined in the implementation

 private:
  explicit Expression(std::unique_ptr<Node> root);
  std::unique_ptr<Node> root_;
};

}  // namespace lagphase
