#include "mpcc/expression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "mpcc/errors.hpp"

namespace mpcc {

struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;
  std::size_t index = 0;
  int exponent = 0;
  Expression a{std::shared_ptr<const Node>()};
  Expression b{std::shared_ptr<const Node>()};
};

namespace {

std::shared_ptr<const Node> make_node(NodeKind kind, const Expression& a, const Expression& b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = a;
  n->b = b;
  return n;
}

double int_power(double base, int exponent) {
  unsigned e = static_cast<unsigned>(exponent < 0 ? -static_cast<long>(exponent) : exponent);
  double result = 1.0;
  double p = base;
  while (e != 0) {
    if (e & 1u) result *= p;
    p *= p;
    e >>= 1u;
  }
  return exponent < 0 ? 1.0 / result : result;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  for (int prec = 1; prec <= 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

}  // namespace

Expression::Expression() {
  static const std::shared_ptr<const Node> zero = std::make_shared<Node>();
  node_ = zero;
}

Expression Expression::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::variable(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->index = index;
  return Expression(std::move(n));
}

NodeKind Expression::kind() const { return node_->kind; }
double Expression::constant_value() const { return node_->value; }
std::size_t Expression::variable_index() const { return node_->index; }
int Expression::exponent() const { return node_->exponent; }
const Expression& Expression::lhs() const { return node_->a; }
const Expression& Expression::rhs() const { return node_->b; }

bool Expression::is_zero() const { return is_constant() && node_->value == 0.0; }
bool Expression::is_one() const { return is_constant() && node_->value == 1.0; }

Expression operator+(const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() + b.constant_value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expression(make_node(NodeKind::Sum, a, b));
}

Expression operator-(const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() - b.constant_value());
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  return Expression(make_node(NodeKind::Difference, a, b));
}

Expression operator*(const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant()) return Expression::constant(a.constant_value() * b.constant_value());
  if (a.is_zero() || b.is_zero()) return Expression::constant(0.0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return Expression(make_node(NodeKind::Product, a, b));
}

Expression operator/(const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
    return Expression::constant(a.constant_value() / b.constant_value());
  if (b.is_one()) return a;
  return Expression(make_node(NodeKind::Quotient, a, b));
}

Expression operator-(const Expression& a) {
  if (a.is_constant()) return Expression::constant(-a.constant_value());
  if (a.kind() == NodeKind::Negation) return a.lhs();
  return Expression(make_node(NodeKind::Negation, a, Expression()));
}

Expression pow(const Expression& base, int exponent) {
  if (exponent == 0) return Expression::constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant() && !(base.constant_value() == 0.0 && exponent < 0))
    return Expression::constant(int_power(base.constant_value(), exponent));
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Power;
  n->exponent = exponent;
  n->a = base;
  return Expression(std::move(n));
}

double Expression::evaluate(const Vector& x) const {
  const Node& n = *node_;
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value;
    case NodeKind::Variable:
      if (n.index >= static_cast<std::size_t>(x.size()))
        throw DimensionError("variable x" + std::to_string(n.index + 1) + " outside point of dimension " +
                             std::to_string(x.size()));
      return x[static_cast<Eigen::Index>(n.index)];
    case NodeKind::Sum:
      return n.a.evaluate(x) + n.b.evaluate(x);
    case NodeKind::Difference:
      return n.a.evaluate(x) - n.b.evaluate(x);
    case NodeKind::Product:
      return n.a.evaluate(x) * n.b.evaluate(x);
    case NodeKind::Quotient: {
      double den = n.b.evaluate(x);
      if (den == 0.0) throw EvaluationError("division by zero in " + to_string());
      return n.a.evaluate(x) / den;
    }
    case NodeKind::Power: {
      double base = n.a.evaluate(x);
      if (base == 0.0 && n.exponent < 0) throw EvaluationError("zero to a negative power in " + to_string());
      return int_power(base, n.exponent);
    }
    case NodeKind::Negation:
      return -n.a.evaluate(x);
  }
  return 0.0;
}

Expression Expression::derivative(std::size_t index) const {
  const Node& n = *node_;
  switch (n.kind) {
    case NodeKind::Constant:
      return constant(0.0);
    case NodeKind::Variable:
      return constant(n.index == index ? 1.0 : 0.0);
    case NodeKind::Sum:
      return n.a.derivative(index) + n.b.derivative(index);
    case NodeKind::Difference:
      return n.a.derivative(index) - n.b.derivative(index);
    case NodeKind::Product:
      return n.a.derivative(index) * n.b + n.a * n.b.derivative(index);
    case NodeKind::Quotient: {
      Expression da = n.a.derivative(index);
      Expression db = n.b.derivative(index);
      if (db.is_zero()) return da / n.b;
      return (da * n.b - n.a * db) / pow(n.b, 2);
    }
    case NodeKind::Power:
      return constant(n.exponent) * pow(n.a, n.exponent - 1) * n.a.derivative(index);
    case NodeKind::Negation:
      return -n.a.derivative(index);
  }
  return constant(0.0);
}

std::size_t Expression::variable_bound() const {
  const Node& n = *node_;
  switch (n.kind) {
    case NodeKind::Constant:
      return 0;
    case NodeKind::Variable:
      return n.index + 1;
    case NodeKind::Power:
    case NodeKind::Negation:
      return n.a.variable_bound();
    default:
      return std::max(n.a.variable_bound(), n.b.variable_bound());
  }
}

bool Expression::same_as(const Expression& other) const {
  if (node_ == other.node_) return true;
  const Node& p = *node_;
  const Node& q = *other.node_;
  if (p.kind != q.kind) return false;
  switch (p.kind) {
    case NodeKind::Constant:
      return std::memcmp(&p.value, &q.value, sizeof(double)) == 0;
    case NodeKind::Variable:
      return p.index == q.index;
    case NodeKind::Power:
      return p.exponent == q.exponent && p.a.same_as(q.a);
    case NodeKind::Negation:
      return p.a.same_as(q.a);
    default:
      return p.a.same_as(q.a) && p.b.same_as(q.b);
  }
}

std::string Expression::to_string() const {
  const Node& n = *node_;
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value < 0 || (n.value == 0.0 && std::signbit(n.value)) ? "(" + format_number(n.value) + ")"
                                                                      : format_number(n.value);
    case NodeKind::Variable:
      return "x" + std::to_string(n.index + 1);
    case NodeKind::Sum:
      return "(" + n.a.to_string() + " + " + n.b.to_string() + ")";
    case NodeKind::Difference:
      return "(" + n.a.to_string() + " - " + n.b.to_string() + ")";
    case NodeKind::Product:
      return "(" + n.a.to_string() + " * " + n.b.to_string() + ")";
    case NodeKind::Quotient:
      return "(" + n.a.to_string() + " / " + n.b.to_string() + ")";
    case NodeKind::Power:
      return "(" + n.a.to_string() + " ^ " + std::to_string(n.exponent) + ")";
    case NodeKind::Negation:
      return "(-" + n.a.to_string() + ")";
  }
  return "";
}

CompiledExpression::CompiledExpression(Expression expr, std::size_t n) : expr_(std::move(expr)), n_(n) {
  if (expr_.variable_bound() > n)
    throw DimensionError("expression " + expr_.to_string() + " references a variable beyond x" + std::to_string(n));
  grad_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grad_.push_back(expr_.derivative(i));
  hess_upper_.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) hess_upper_.push_back(grad_[i].derivative(j));
}

double CompiledExpression::value(const Vector& x) const { return expr_.evaluate(x); }

Vector CompiledExpression::gradient(const Vector& x) const {
  Vector g(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) g[static_cast<Eigen::Index>(i)] = grad_[i].evaluate(x);
  return g;
}

Matrix CompiledExpression::hessian(const Vector& x) const {
  const auto n = static_cast<Eigen::Index>(n_);
  Matrix h(n, n);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      h(i, j) = hess_upper_[k++].evaluate(x);
      h(j, i) = h(i, j);
    }
  return h;
}

FunctionValue CompiledExpression::evaluate(const Vector& x) const {
  return FunctionValue{value(x), gradient(x), hessian(x)};
}

}  // namespace mpcc
