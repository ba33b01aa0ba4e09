#include "mpcc/disjunctive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpcc/errors.hpp"

namespace mpcc {

std::string to_string(Stationarity s) {
  switch (s) {
    case Stationarity::S:
      return "S";
    case Stationarity::M:
      return "M";
    case Stationarity::C:
      return "C";
    case Stationarity::None:
      return "none";
  }
  return "";
}

std::string to_string(DisjMode mode) { return mode == DisjMode::Enumerate ? "enumerate" : "greedy"; }

DisjMode parse_disj_mode(const std::string& name) {
  if (name == "enumerate") return DisjMode::Enumerate;
  if (name == "greedy") return DisjMode::Greedy;
  throw ParameterError("unknown mode '" + name + "' (valid: enumerate, greedy)");
}

RankReport rank_test(const Matrix& columns, double tol) {
  RankReport r;
  r.columns = columns.cols();
  if (columns.cols() == 0) return r;
  Eigen::JacobiSVD<Matrix> svd(columns);
  const Vector& sv = svd.singularValues();
  r.largest_singular = sv.size() > 0 ? sv[0] : 0.0;
  r.smallest_singular = columns.cols() > columns.rows() ? 0.0 : sv[sv.size() - 1];
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * r.largest_singular && sv[i] > 0) ++r.rank;
  r.full_rank = r.rank == columns.cols();
  return r;
}

Matrix disj_active_gradients(const DisjunctiveNlp& disj, const Vector& x, const DisjActiveSets& sets) {
  const auto& p = *disj.problem;
  std::vector<Vector> cols;
  for (auto j : sets.h12) {
    cols.push_back(-p.pairs[j].first.gradient(x));
    cols.push_back(-p.pairs[j].second.gradient(x));
  }
  for (auto j : sets.h1) cols.push_back(-p.pairs[j].first.gradient(x));
  for (auto j : sets.h2) cols.push_back(-p.pairs[j].second.gradient(x));
  for (auto j : sets.n1) cols.push_back(p.pairs[j].first.gradient(x));
  for (auto j : sets.n2) cols.push_back(p.pairs[j].second.gradient(x));
  for (auto i : sets.ineq) cols.push_back(p.side_ineq[i].gradient(x));
  for (const auto& h : p.side_eq) cols.push_back(h.gradient(x));
  Matrix A(static_cast<Eigen::Index>(p.n), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) A.col(static_cast<Eigen::Index>(k)) = cols[k];
  return A;
}

RankReport disj_licq(const DisjunctiveNlp& disj, const Vector& x, double tol) {
  DisjActiveSets sets = disj_active_sets(disj, x, tol);
  return rank_test(disj_active_gradients(disj, x, sets), tol);
}

DisjMultipliers recover_disj_multipliers(const DisjunctiveNlp& disj, const Vector& x, double tol) {
  return recover_disj_multipliers(disj, x, disj_active_sets(disj, x, tol));
}

DisjMultipliers recover_disj_multipliers(const DisjunctiveNlp& disj, const Vector& x, const DisjActiveSets& sets) {
  const auto& p = *disj.problem;
  const auto kappa = static_cast<Eigen::Index>(p.kappa());
  DisjMultipliers m;
  m.zeta1 = m.zeta2 = m.eta1 = m.eta2 = m.nu1 = m.nu2 = Vector::Zero(kappa);
  m.side_ineq = Vector::Zero(static_cast<Eigen::Index>(p.side_ineq.size()));
  m.side_eq = Vector::Zero(static_cast<Eigen::Index>(p.side_eq.size()));

  Matrix A = disj_active_gradients(disj, x, sets);
  Vector g = p.objective.gradient(x);
  m.licq = rank_test(A, sets.tol).full_rank;
  if (A.cols() == 0) {
    m.residual = g.cwiseAbs().maxCoeff();
    return m;
  }
  Vector sol = A.completeOrthogonalDecomposition().solve(g);
  m.residual = (A * sol - g).cwiseAbs().maxCoeff();

  Eigen::Index k = 0;
  for (auto j : sets.h12) {
    m.zeta1[static_cast<Eigen::Index>(j)] = sol[k++];
    m.zeta2[static_cast<Eigen::Index>(j)] = sol[k++];
  }
  for (auto j : sets.h1) m.eta1[static_cast<Eigen::Index>(j)] = sol[k++];
  for (auto j : sets.h2) m.eta2[static_cast<Eigen::Index>(j)] = sol[k++];
  for (auto j : sets.n1) m.nu1[static_cast<Eigen::Index>(j)] = sol[k++];
  for (auto j : sets.n2) m.nu2[static_cast<Eigen::Index>(j)] = sol[k++];
  for (auto i : sets.ineq) m.side_ineq[static_cast<Eigen::Index>(i)] = sol[k++];
  for (std::size_t i = 0; i < p.side_eq.size(); ++i) m.side_eq[static_cast<Eigen::Index>(i)] = sol[k++];
  return m;
}

Stationarity classify_disj_stationarity(const DisjMultipliers& m, const DisjActiveSets& sets, double tol) {
  auto neg = [tol](double v) { return v < -tol; };
  for (auto j : sets.h12)
    if (neg(m.zeta1[static_cast<Eigen::Index>(j)]) || neg(m.zeta2[static_cast<Eigen::Index>(j)]))
      return Stationarity::None;
  for (auto j : sets.h1)
    if (neg(m.eta1[static_cast<Eigen::Index>(j)])) return Stationarity::None;
  for (auto j : sets.h2)
    if (neg(m.eta2[static_cast<Eigen::Index>(j)])) return Stationarity::None;
  for (auto j : sets.n1)
    if (neg(m.nu1[static_cast<Eigen::Index>(j)])) return Stationarity::None;
  for (auto j : sets.n2)
    if (neg(m.nu2[static_cast<Eigen::Index>(j)])) return Stationarity::None;
  for (auto i : sets.ineq)
    if (neg(m.side_ineq[static_cast<Eigen::Index>(i)])) return Stationarity::None;

  bool s = true;
  bool mstat = true;
  for (auto j : sets.h12) {
    double a = std::abs(m.zeta1[static_cast<Eigen::Index>(j)]);
    double b = std::abs(m.zeta2[static_cast<Eigen::Index>(j)]);
    if (a > tol || b > tol) s = false;
    if (a > tol && b > tol) mstat = false;
  }
  if (s) return Stationarity::S;
  if (mstat) return Stationarity::M;
  return Stationarity::C;
}

namespace {

BranchPattern pattern_from_index(std::size_t index, std::size_t kappa) {
  BranchPattern p(kappa);
  for (std::size_t j = 0; j < kappa; ++j) p[j] = (index >> (kappa - 1 - j)) & 1u ? Branch::B : Branch::A;
  return p;
}

}  // namespace

DisjSolution solve_disjunctive(const DisjunctiveNlp& disj, const Vector& x0, const SolverOptions& opts,
                               DisjMode mode) {
  const std::size_t kappa = disj.kappa();
  if (static_cast<std::size_t>(x0.size()) != disj.n()) throw DimensionError("start point has the wrong dimension");

  std::vector<BranchPattern> patterns;
  if (mode == DisjMode::Enumerate) {
    if (kappa > kEnumerationCap)
      throw ParameterError("enumerate mode supports at most " + std::to_string(kEnumerationCap) + " pairs");
    for (std::size_t i = 0; i < (std::size_t{1} << kappa); ++i) patterns.push_back(pattern_from_index(i, kappa));
  } else {
    BranchPattern p(kappa);
    for (std::size_t j = 0; j < kappa; ++j)
      p[j] = disj.problem->pairs[j].first.value(x0) <= disj.problem->pairs[j].second.value(x0) ? Branch::A : Branch::B;
    patterns.push_back(p);
  }

  const double feas = std::max(opts.feas_tol, kActivationTol);
  DisjSolution best;
  bool have_best = false;
  Vector fallback = x0;
  double fallback_vio = std::numeric_limits<double>::infinity();
  NlpStatus fallback_status = NlpStatus::Infeasible;
  BranchPattern fallback_pattern = patterns.front();

  for (const auto& pattern : patterns) {
    NlpSolution sol = solve_nlp(disj.branch_nlp(pattern), x0, opts);
    double vio = disj.violation(sol.x);
    if (sol.status == NlpStatus::Converged && vio <= feas) {
      ++best.feasible_patterns;
      double scale = 1e-9 * (1.0 + std::abs(best.objective));
      if (!have_best || sol.objective < best.objective - scale) {
        best.x = sol.x;
        best.objective = sol.objective;
        best.pattern = pattern;
        have_best = true;
      }
    } else if (vio < fallback_vio && sol.x.allFinite()) {
      fallback_vio = vio;
      fallback = sol.x;
      fallback_pattern = pattern;
      fallback_status = sol.status == NlpStatus::Converged ? NlpStatus::Infeasible : sol.status;
    }
  }

  if (!have_best) {
    best.x = fallback;
    best.objective = disj.problem->objective.value(fallback);
    best.pattern = fallback_pattern;
    best.status = fallback_status == NlpStatus::NumericalFailure ? NlpStatus::NumericalFailure : NlpStatus::Infeasible;
    return best;
  }

  best.status = NlpStatus::Converged;
  best.sets = disj_active_sets(disj, best.x, feas);
  best.multipliers = recover_disj_multipliers(disj, best.x, best.sets);
  best.stationarity =
      best.multipliers.residual <= 1e-6 ? classify_disj_stationarity(best.multipliers, best.sets) : Stationarity::None;
  return best;
}

}  // namespace mpcc
