#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mpcc/expression.hpp"

namespace mpcc {

inline constexpr double kActivationTol = 1e-8;

struct ComplementarityPair {
  CompiledExpression first;
  CompiledExpression second;
};

/// min f(x) s.t. F1_j(x) * F2_j(x) = 0, F1_j(x) >= 0, F2_j(x) >= 0,
///               g_i(x) >= 0, h_k(x) = 0.
struct MpccProblem {
  std::string name;
  std::size_t n = 0;
  CompiledExpression objective;
  std::vector<ComplementarityPair> pairs;
  std::vector<CompiledExpression> side_ineq;
  std::vector<CompiledExpression> side_eq;
  Vector start;
  /// Free-form `#@ key value` annotations from the problem file.
  std::map<std::string, std::string> metadata;

  std::size_t kappa() const { return pairs.size(); }

  /// Throws DimensionError if the invariants are broken.
  void validate() const;
};

MpccProblem make_problem(std::string name, std::size_t n, const Expression& objective,
                         const std::vector<std::pair<Expression, Expression>>& pairs,
                         const std::vector<Expression>& side_ineq = {},
                         const std::vector<Expression>& side_eq = {}, Vector start = Vector());

MpccProblem parse_problem(const std::string& text);
MpccProblem load_problem(const std::string& path);
/// Parses a standalone arithmetic expression over x1..xn.
Expression parse_expression(const std::string& text, std::size_t n);

/// Canonical problem text; parse_problem(print_problem(p)) reproduces p.
std::string print_problem(const MpccProblem& problem);

/// True iff both problems have identical expression trees, dimensions and start.
bool structurally_equal(const MpccProblem& a, const MpccProblem& b);

struct EvalRecord {
  FunctionValue objective;
  std::vector<FunctionValue> first;
  std::vector<FunctionValue> second;
  std::vector<FunctionValue> ineq;
  std::vector<FunctionValue> eq;
};

EvalRecord evaluate(const MpccProblem& problem, const Vector& x);

/// Zero-based pair indices.
struct ActiveSets {
  std::vector<std::size_t> a01;  // F1 active, F2 positive
  std::vector<std::size_t> a10;  // F2 active, F1 positive
  std::vector<std::size_t> a00;  // biactive
  std::vector<std::size_t> ineq;  // active side inequalities
  double tol = kActivationTol;
};

/// Throws ClassificationRefused when maxvio(x) exceeds tol.
ActiveSets active_sets(const MpccProblem& problem, const Vector& x, double tol = kActivationTol);

/// max{-min(0,g), |h|, |min(F1,F2)|} over all components.
double maxvio(const MpccProblem& problem, const Vector& x);

}  // namespace mpcc
