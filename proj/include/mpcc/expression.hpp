#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mpcc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class NodeKind { Constant, Variable, Sum, Difference, Product, Quotient, Power, Negation };

struct Node;

/// Immutable expression tree over variables x1..xn.
///
/// Nodes are shared, so copying an Expression is cheap. All factory functions
/// apply light algebraic folding (constants, additive/multiplicative identities)
/// which keeps derivative trees small. The parser uses the same factories, so a
/// printed expression parses back to the identical tree.
class Expression {
 public:
  Expression();  // constant 0

  static Expression constant(double value);
  /// Zero-based variable index; printed as x{index+1}.
  static Expression variable(std::size_t index);

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  friend Expression pow(const Expression& base, int exponent);

  NodeKind kind() const;
  double constant_value() const;  // valid for Constant
  std::size_t variable_index() const;  // valid for Variable
  int exponent() const;  // valid for Power
  const Expression& lhs() const;  // first operand (unary ops: the operand)
  const Expression& rhs() const;  // second operand of binary ops

  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_zero() const;
  bool is_one() const;

  /// Throws EvaluationError on division by zero or 0^negative.
  double evaluate(const Vector& x) const;

  Expression derivative(std::size_t index) const;

  /// One past the largest variable index referenced, 0 for constant trees.
  std::size_t variable_bound() const;

  /// Structural equality (same node kinds, same constants bit for bit).
  bool same_as(const Expression& other) const;

  std::string to_string() const;

 private:
  friend struct Node;
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Value, gradient and Hessian of a scalar function at a point.
struct FunctionValue {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

/// An expression together with its symbolic gradient and Hessian.
///
/// Only the upper triangle of the Hessian is differentiated; the lower
/// triangle is mirrored so the evaluated matrix is exactly symmetric.
class CompiledExpression {
 public:
  CompiledExpression() = default;
  CompiledExpression(Expression expr, std::size_t n);

  const Expression& expression() const { return expr_; }
  std::size_t dimension() const { return n_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
  FunctionValue evaluate(const Vector& x) const;

  const std::vector<Expression>& gradient_expressions() const { return grad_; }

 private:
  Expression expr_;
  std::size_t n_ = 0;
  std::vector<Expression> grad_;
  std::vector<Expression> hess_upper_;  // row-major upper triangle
};

}  // namespace mpcc
