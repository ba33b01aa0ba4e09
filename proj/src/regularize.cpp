#include "mpcc/regularize.hpp"

#include <algorithm>
#include <cmath>

#include "mpcc/errors.hpp"

namespace mpcc {

std::string to_string(RegKind kind) {
  switch (kind) {
    case RegKind::Scholtes:
      return "scholtes";
    case RegKind::KanzowSchwartz:
      return "ks";
    case RegKind::Disjunctive:
      return "disj";
    case RegKind::QuadrantPenalty:
      return "qpf";
  }
  return "";
}

RegKind parse_reg_kind(const std::string& name) {
  if (name == "scholtes") return RegKind::Scholtes;
  if (name == "ks") return RegKind::KanzowSchwartz;
  if (name == "disj") return RegKind::Disjunctive;
  if (name == "qpf") return RegKind::QuadrantPenalty;
  throw ParameterError("unknown regularization '" + name + "' (valid: scholtes, ks, disj, qpf)");
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::ScholtesProduct:
      return "scholtes-product";
    case Provenance::KsPhi:
      return "ks-phi";
    case Provenance::QpfPenalty:
      return "qpf-penalty";
    case Provenance::LowerF1:
      return "lower-F1";
    case Provenance::LowerF2:
      return "lower-F2";
    case Provenance::BranchA:
      return "branch-A";
    case Provenance::BranchB:
      return "branch-B";
    case Provenance::Side:
      return "side";
  }
  return "";
}

PhiValue ks_phi(double a, double b) {
  if (a + b >= 0) return {a * b, {b, a}};
  return {-0.5 * (a * a + b * b), {-a, -b}};
}

double quadrant_penalty_g(double u, double v, double beta) {
  if (!(beta > 1.0)) throw ParameterError("beta must exceed 1");
  if (u <= 0.0 || v >= 0.0) return 0.0;
  if (v <= -beta * u) return u * u;
  if (v >= -u / beta) return v * v;
  return (u * u + 2.0 * beta * u * v + v * v) / (1.0 - beta * beta);
}

FunctionValue quadrant_penalty_eval(double u, double v, double beta) {
  if (!(beta > 1.0)) throw ParameterError("beta must exceed 1");
  FunctionValue r{0.0, Vector::Zero(2), Matrix::Zero(2, 2)};
  if (u <= 0.0 || v >= 0.0) return r;
  if (v <= -beta * u) {
    r.value = u * u;
    r.gradient << 2.0 * u, 0.0;
    r.hessian(0, 0) = 2.0;
  } else if (v >= -u / beta) {
    r.value = v * v;
    r.gradient << 0.0, 2.0 * v;
    r.hessian(1, 1) = 2.0;
  } else {
    double d = 1.0 - beta * beta;
    r.value = (u * u + 2.0 * beta * u * v + v * v) / d;
    r.gradient << (2.0 * u + 2.0 * beta * v) / d, (2.0 * beta * u + 2.0 * v) / d;
    r.hessian << 2.0 / d, 2.0 * beta / d, 2.0 * beta / d, 2.0 / d;
  }
  return r;
}

double SmoothNlp::violation(const Vector& x) const {
  double v = 0.0;
  for (const auto& c : ineq) v = std::max(v, -c.value(x));
  for (const auto& c : eq) v = std::max(v, std::abs(c.value(x)));
  return v;
}

namespace {

void require_positive_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("regularization parameter t must be positive");
}

Constraint from_expression(const CompiledExpression& e, ConstraintTag tag) {
  return Constraint{tag, [e](const Vector& x) { return e.value(x); }, [e](const Vector& x) { return e.evaluate(x); }};
}

/// t - F(x) >= 0
Constraint upper_bound(const CompiledExpression& e, double t, ConstraintTag tag) {
  return Constraint{tag, [e, t](const Vector& x) { return t - e.value(x); },
                    [e, t](const Vector& x) {
                      FunctionValue f = e.evaluate(x);
                      return FunctionValue{t - f.value, -f.gradient, -f.hessian};
                    }};
}

SmoothNlp skeleton(const MpccProblem& problem, double t, RegKind kind) {
  SmoothNlp nlp;
  nlp.n = problem.n;
  nlp.t = t;
  nlp.kind = kind;
  nlp.objective = problem.objective;
  return nlp;
}

void add_bounds_and_side(SmoothNlp& nlp, const MpccProblem& problem) {
  for (std::size_t j = 0; j < problem.kappa(); ++j) {
    nlp.ineq.push_back(from_expression(problem.pairs[j].first, {Provenance::LowerF1, j}));
    nlp.ineq.push_back(from_expression(problem.pairs[j].second, {Provenance::LowerF2, j}));
  }
  for (std::size_t i = 0; i < problem.side_ineq.size(); ++i)
    nlp.ineq.push_back(from_expression(problem.side_ineq[i], {Provenance::Side, i}));
  for (std::size_t i = 0; i < problem.side_eq.size(); ++i)
    nlp.eq.push_back(from_expression(problem.side_eq[i], {Provenance::Side, i}));
}

}  // namespace

SmoothNlp scholtes(const MpccProblem& problem, double t) {
  require_positive_t(t);
  SmoothNlp nlp = skeleton(problem, t, RegKind::Scholtes);
  for (std::size_t j = 0; j < problem.kappa(); ++j) {
    const auto& p = problem.pairs[j];
    auto a = p.first;
    auto b = p.second;
    nlp.ineq.push_back(Constraint{
        {Provenance::ScholtesProduct, j}, [a, b, t](const Vector& x) { return t - a.value(x) * b.value(x); },
        [a, b, t](const Vector& x) {
          FunctionValue fa = a.evaluate(x);
          FunctionValue fb = b.evaluate(x);
          FunctionValue r;
          r.value = t - fa.value * fb.value;
          r.gradient = -(fb.value * fa.gradient + fa.value * fb.gradient);
          r.hessian = -(fa.gradient * fb.gradient.transpose() + fb.gradient * fa.gradient.transpose() +
                        fb.value * fa.hessian + fa.value * fb.hessian);
          return r;
        }});
  }
  add_bounds_and_side(nlp, problem);
  return nlp;
}

SmoothNlp kanzow_schwartz(const MpccProblem& problem, double t) {
  require_positive_t(t);
  SmoothNlp nlp = skeleton(problem, t, RegKind::KanzowSchwartz);
  for (std::size_t j = 0; j < problem.kappa(); ++j) {
    auto f1 = problem.pairs[j].first;
    auto f2 = problem.pairs[j].second;
    nlp.ineq.push_back(Constraint{
        {Provenance::KsPhi, j},
        [f1, f2, t](const Vector& x) { return -ks_phi(f1.value(x) - t, f2.value(x) - t).value; },
        [f1, f2, t](const Vector& x) {
          FunctionValue g1 = f1.evaluate(x);
          FunctionValue g2 = f2.evaluate(x);
          double a = g1.value - t;
          double b = g2.value - t;
          FunctionValue r;
          if (a + b >= 0) {
            r.value = -a * b;
            r.gradient = -(b * g1.gradient + a * g2.gradient);
            r.hessian = -(g1.gradient * g2.gradient.transpose() + g2.gradient * g1.gradient.transpose() +
                          b * g1.hessian + a * g2.hessian);
          } else {
            r.value = 0.5 * (a * a + b * b);
            r.gradient = a * g1.gradient + b * g2.gradient;
            r.hessian = g1.gradient * g1.gradient.transpose() + g2.gradient * g2.gradient.transpose() +
                        a * g1.hessian + b * g2.hessian;
          }
          return r;
        }});
  }
  add_bounds_and_side(nlp, problem);
  return nlp;
}

SmoothNlp quadrant_penalty(const MpccProblem& problem, double t, double beta) {
  require_positive_t(t);
  if (!(beta > 1.0)) throw ParameterError("beta must exceed 1");
  SmoothNlp nlp = skeleton(problem, t, RegKind::QuadrantPenalty);
  for (std::size_t j = 0; j < problem.kappa(); ++j) {
    auto f1 = problem.pairs[j].first;
    auto f2 = problem.pairs[j].second;
    nlp.eq.push_back(Constraint{
        {Provenance::QpfPenalty, j},
        [f1, f2, t, beta](const Vector& x) { return quadrant_penalty_g(f1.value(x) - t, t - f2.value(x), beta); },
        [f1, f2, t, beta](const Vector& x) {
          FunctionValue g1 = f1.evaluate(x);
          FunctionValue g2 = f2.evaluate(x);
          FunctionValue q = quadrant_penalty_eval(g1.value - t, t - g2.value, beta);
          // chain rule with du = dF1, dv = -dF2
          Vector du = g1.gradient;
          Vector dv = -g2.gradient;
          FunctionValue r;
          r.value = q.value;
          r.gradient = q.gradient[0] * du + q.gradient[1] * dv;
          r.hessian = q.hessian(0, 0) * du * du.transpose() + q.hessian(0, 1) * (du * dv.transpose() + dv * du.transpose()) +
                      q.hessian(1, 1) * dv * dv.transpose() + q.gradient[0] * g1.hessian - q.gradient[1] * g2.hessian;
          return r;
        }});
  }
  add_bounds_and_side(nlp, problem);
  return nlp;
}

DisjunctiveNlp disjunctive(std::shared_ptr<const MpccProblem> problem, double t) {
  require_positive_t(t);
  return DisjunctiveNlp{std::move(problem), t};
}

DisjunctiveNlp disjunctive(const MpccProblem& problem, double t) {
  return disjunctive(std::make_shared<const MpccProblem>(problem), t);
}

double DisjunctiveNlp::violation(const Vector& x) const {
  double v = 0.0;
  for (const auto& p : problem->pairs) {
    double a = p.first.value(x);
    double b = p.second.value(x);
    v = std::max({v, -a, -b, std::min(a, b) - t});
  }
  for (const auto& g : problem->side_ineq) v = std::max(v, -g.value(x));
  for (const auto& h : problem->side_eq) v = std::max(v, std::abs(h.value(x)));
  return v;
}

SmoothNlp DisjunctiveNlp::branch_nlp(const BranchPattern& pattern) const {
  if (pattern.size() != kappa()) throw DimensionError("branch pattern length differs from the pair count");
  SmoothNlp nlp = skeleton(*problem, t, RegKind::Disjunctive);
  for (std::size_t j = 0; j < kappa(); ++j) {
    if (pattern[j] == Branch::A) {
      nlp.ineq.push_back(upper_bound(problem->pairs[j].first, t, {Provenance::BranchA, j}));
    } else {
      nlp.ineq.push_back(upper_bound(problem->pairs[j].second, t, {Provenance::BranchB, j}));
    }
  }
  add_bounds_and_side(nlp, *problem);
  return nlp;
}

bool regularized_feasible(const MpccProblem& problem, RegKind kind, double t, const Vector& x, double tol,
                          double beta) {
  switch (kind) {
    case RegKind::Scholtes:
      return scholtes(problem, t).feasible(x, tol);
    case RegKind::KanzowSchwartz:
      return kanzow_schwartz(problem, t).feasible(x, tol);
    case RegKind::QuadrantPenalty:
      return quadrant_penalty(problem, t, beta).feasible(x, tol);
    case RegKind::Disjunctive: {
      require_positive_t(t);
      DisjunctiveNlp d{std::shared_ptr<const MpccProblem>(&problem, [](const MpccProblem*) {}), t};
      return d.feasible(x, tol);
    }
  }
  return false;
}

DisjActiveSets disj_active_sets(const DisjunctiveNlp& disj, const Vector& x, double tol) {
  double vio = disj.violation(x);
  if (vio > tol) throw ClassificationRefused("point is not feasible for D(t)", vio);
  DisjActiveSets s;
  s.tol = tol;
  const double t = disj.t;
  for (std::size_t j = 0; j < disj.kappa(); ++j) {
    double a = disj.problem->pairs[j].first.value(x);
    double b = disj.problem->pairs[j].second.value(x);
    bool at1 = std::abs(a - t) <= tol;
    bool at2 = std::abs(b - t) <= tol;
    if (at1 && at2) {
      s.h12.push_back(j);
    } else if (at1 && b > t + tol) {
      s.h1.push_back(j);
    } else if (at2 && a > t + tol) {
      s.h2.push_back(j);
    }
    if (std::abs(a) <= tol) s.n1.push_back(j);
    if (std::abs(b) <= tol) s.n2.push_back(j);
  }
  for (std::size_t i = 0; i < disj.problem->side_ineq.size(); ++i)
    if (std::abs(disj.problem->side_ineq[i].value(x)) <= tol) s.ineq.push_back(i);
  return s;
}

}  // namespace mpcc
