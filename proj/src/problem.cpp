#include <algorithm>
#include <cmath>

#include "mpcc/errors.hpp"
#include "mpcc/problem.hpp"

namespace mpcc {

void MpccProblem::validate() const {
  if (n == 0) throw DimensionError("problem needs at least one variable");
  if (pairs.empty()) throw DimensionError("problem needs at least one complementarity pair");
  if (static_cast<std::size_t>(start.size()) != n)
    throw DimensionError("start has dimension " + std::to_string(start.size()) + " but n = " + std::to_string(n));
  if (!start.allFinite()) throw DimensionError("start must be finite");
  auto check = [&](const CompiledExpression& e) {
    if (e.dimension() != n) throw DimensionError("expression compiled for dimension " + std::to_string(e.dimension()));
  };
  check(objective);
  for (const auto& p : pairs) {
    check(p.first);
    check(p.second);
  }
  for (const auto& g : side_ineq) check(g);
  for (const auto& h : side_eq) check(h);
}

MpccProblem make_problem(std::string name, std::size_t n, const Expression& objective,
                         const std::vector<std::pair<Expression, Expression>>& pairs,
                         const std::vector<Expression>& side_ineq, const std::vector<Expression>& side_eq,
                         Vector start) {
  MpccProblem p;
  p.name = std::move(name);
  p.n = n;
  p.objective = CompiledExpression(objective, n);
  for (const auto& [a, b] : pairs) p.pairs.push_back({CompiledExpression(a, n), CompiledExpression(b, n)});
  for (const auto& g : side_ineq) p.side_ineq.emplace_back(g, n);
  for (const auto& h : side_eq) p.side_eq.emplace_back(h, n);
  p.start = start.size() == 0 ? Vector::Zero(static_cast<Eigen::Index>(n)) : std::move(start);
  p.validate();
  return p;
}

bool structurally_equal(const MpccProblem& a, const MpccProblem& b) {
  if (a.n != b.n || a.pairs.size() != b.pairs.size() || a.side_ineq.size() != b.side_ineq.size() ||
      a.side_eq.size() != b.side_eq.size() || a.name != b.name)
    return false;
  if (a.start.size() != b.start.size() || a.start != b.start) return false;
  if (!a.objective.expression().same_as(b.objective.expression())) return false;
  for (std::size_t j = 0; j < a.pairs.size(); ++j) {
    if (!a.pairs[j].first.expression().same_as(b.pairs[j].first.expression())) return false;
    if (!a.pairs[j].second.expression().same_as(b.pairs[j].second.expression())) return false;
  }
  for (std::size_t i = 0; i < a.side_ineq.size(); ++i)
    if (!a.side_ineq[i].expression().same_as(b.side_ineq[i].expression())) return false;
  for (std::size_t i = 0; i < a.side_eq.size(); ++i)
    if (!a.side_eq[i].expression().same_as(b.side_eq[i].expression())) return false;
  return true;
}

EvalRecord evaluate(const MpccProblem& problem, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != problem.n)
    throw DimensionError("point has dimension " + std::to_string(x.size()) + " but n = " + std::to_string(problem.n));
  EvalRecord r;
  r.objective = problem.objective.evaluate(x);
  for (const auto& p : problem.pairs) {
    r.first.push_back(p.first.evaluate(x));
    r.second.push_back(p.second.evaluate(x));
  }
  for (const auto& g : problem.side_ineq) r.ineq.push_back(g.evaluate(x));
  for (const auto& h : problem.side_eq) r.eq.push_back(h.evaluate(x));
  return r;
}

double maxvio(const MpccProblem& problem, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != problem.n)
    throw DimensionError("point has dimension " + std::to_string(x.size()) + " but n = " + std::to_string(problem.n));
  double v = 0.0;
  for (const auto& g : problem.side_ineq) v = std::max(v, -std::min(0.0, g.value(x)));
  for (const auto& h : problem.side_eq) v = std::max(v, std::abs(h.value(x)));
  for (const auto& p : problem.pairs) v = std::max(v, std::abs(std::min(p.first.value(x), p.second.value(x))));
  return v;
}

ActiveSets active_sets(const MpccProblem& problem, const Vector& x, double tol) {
  double vio = maxvio(problem, x);
  if (vio > tol) throw ClassificationRefused("point is not feasible for the MPCC", vio);
  ActiveSets s;
  s.tol = tol;
  for (std::size_t j = 0; j < problem.kappa(); ++j) {
    bool z1 = std::abs(problem.pairs[j].first.value(x)) <= tol;
    bool z2 = std::abs(problem.pairs[j].second.value(x)) <= tol;
    if (z1 && z2) {
      s.a00.push_back(j);
    } else if (z1) {
      s.a01.push_back(j);
    } else {
      s.a10.push_back(j);
    }
  }
  for (std::size_t i = 0; i < problem.side_ineq.size(); ++i)
    if (std::abs(problem.side_ineq[i].value(x)) <= tol) s.ineq.push_back(i);
  return s;
}

}  // namespace mpcc
