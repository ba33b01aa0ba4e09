#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mpcc/problem.hpp"

namespace mpcc {

enum class RegKind { Scholtes, KanzowSchwartz, Disjunctive, QuadrantPenalty };

std::string to_string(RegKind kind);
/// Accepts scholtes, ks, disj, qpf. Throws ParameterError otherwise.
RegKind parse_reg_kind(const std::string& name);

enum class Provenance { ScholtesProduct, KsPhi, QpfPenalty, LowerF1, LowerF2, BranchA, BranchB, Side };

std::string to_string(Provenance p);

struct ConstraintTag {
  Provenance kind = Provenance::Side;
  std::size_t index = 0;  // pair index, or side-constraint index for Side
};

/// A smooth constraint c(x) >= 0 (or = 0 for equalities).
struct Constraint {
  ConstraintTag tag;
  std::function<double(const Vector&)> value;
  std::function<FunctionValue(const Vector&)> evaluate;
};

struct SmoothNlp {
  std::size_t n = 0;
  double t = 0.0;
  RegKind kind = RegKind::Scholtes;
  CompiledExpression objective;
  std::vector<Constraint> ineq;  // c(x) >= 0
  std::vector<Constraint> eq;  // c(x) = 0

  std::size_t constraint_count() const { return ineq.size() + eq.size(); }
  /// Largest violation over all constraints.
  double violation(const Vector& x) const;
  bool feasible(const Vector& x, double tol) const { return violation(x) <= tol; }
};

struct PhiValue {
  double value = 0.0;
  std::array<double, 2> gradient{};
};

/// phi(a,b) = ab if a+b >= 0, else -(a^2+b^2)/2.
PhiValue ks_phi(double a, double b);

/// Smooth quadrant penalty; zero exactly where u <= 0 or v >= 0.
double quadrant_penalty_g(double u, double v, double beta);
/// Value, gradient and Hessian with respect to (u, v).
FunctionValue quadrant_penalty_eval(double u, double v, double beta);

SmoothNlp scholtes(const MpccProblem& problem, double t);
SmoothNlp kanzow_schwartz(const MpccProblem& problem, double t);
SmoothNlp quadrant_penalty(const MpccProblem& problem, double t, double beta = 2.0);

enum class Branch { A, B };  // A enforces t - F1 >= 0, B enforces t - F2 >= 0
using BranchPattern = std::vector<Branch>;

/// min f s.t. max{t - F1_j, t - F2_j} >= 0, F1_j >= 0, F2_j >= 0, side constraints.
struct DisjunctiveNlp {
  std::shared_ptr<const MpccProblem> problem;
  double t = 0.0;

  std::size_t n() const { return problem->n; }
  std::size_t kappa() const { return problem->kappa(); }
  double violation(const Vector& x) const;
  bool feasible(const Vector& x, double tol) const { return violation(x) <= tol; }
  /// The smooth NLP obtained by fixing one branch per pair.
  SmoothNlp branch_nlp(const BranchPattern& pattern) const;
};

DisjunctiveNlp disjunctive(const MpccProblem& problem, double t);
DisjunctiveNlp disjunctive(std::shared_ptr<const MpccProblem> problem, double t);

/// Feasibility probe of the regularization R(t) used by the homotopy driver.
bool regularized_feasible(const MpccProblem& problem, RegKind kind, double t, const Vector& x, double tol,
                          double beta = 2.0);

/// Zero-based pair indices.
struct DisjActiveSets {
  std::vector<std::size_t> h12, h1, h2, n1, n2;
  std::vector<std::size_t> ineq;  // active side inequalities
  double tol = kActivationTol;
};

/// Throws ClassificationRefused when x violates D(t) beyond tol.
DisjActiveSets disj_active_sets(const DisjunctiveNlp& disj, const Vector& x, double tol = kActivationTol);

}  // namespace mpcc
