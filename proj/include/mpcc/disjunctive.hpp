#pragma once

#include <string>
#include <vector>

#include "mpcc/nlp.hpp"
#include "mpcc/regularize.hpp"

namespace mpcc {

enum class Stationarity { S, M, C, None };

std::string to_string(Stationarity s);

/// Multipliers of grad f = -sum_H12 (z1 dF1 + z2 dF2) - sum_H1 e1 dF1 - sum_H2 e2 dF2
///                        + sum_N1 n1 dF1 + sum_N2 n2 dF2 + sum l dg + sum m dh.
/// Vectors have length kappa (resp. side counts); entries outside the active sets are zero.
struct DisjMultipliers {
  Vector zeta1, zeta2, eta1, eta2, nu1, nu2;
  Vector side_ineq, side_eq;
  double residual = 0.0;
  bool licq = true;
};

struct RankReport {
  bool full_rank = true;
  Eigen::Index rank = 0;
  Eigen::Index columns = 0;
  double smallest_singular = 0.0;
  double largest_singular = 0.0;
};

/// Column-rank test: smallest singular value > tol * largest.
RankReport rank_test(const Matrix& columns, double tol = kActivationTol);

/// Active gradient family of D(t) at x, in multiplier order.
Matrix disj_active_gradients(const DisjunctiveNlp& disj, const Vector& x, const DisjActiveSets& sets);

RankReport disj_licq(const DisjunctiveNlp& disj, const Vector& x, double tol = kActivationTol);

DisjMultipliers recover_disj_multipliers(const DisjunctiveNlp& disj, const Vector& x, double tol = kActivationTol);
DisjMultipliers recover_disj_multipliers(const DisjunctiveNlp& disj, const Vector& x, const DisjActiveSets& sets);

Stationarity classify_disj_stationarity(const DisjMultipliers& m, const DisjActiveSets& sets, double tol = 1e-6);

enum class DisjMode { Enumerate, Greedy };

std::string to_string(DisjMode mode);
DisjMode parse_disj_mode(const std::string& name);

struct DisjSolution {
  Vector x;
  double objective = 0.0;
  DisjActiveSets sets;
  DisjMultipliers multipliers;
  Stationarity stationarity = Stationarity::None;
  BranchPattern pattern;
  NlpStatus status = NlpStatus::Infeasible;
  /// Number of branch subproblems that converged to a point feasible for D(t).
  int feasible_patterns = 0;
};

inline constexpr std::size_t kEnumerationCap = 12;

/// Enumerate solves every branch pattern from x0 and keeps the best converged point
/// feasible for the full disjunction (ties: lexicographically smallest pattern, A < B).
/// Greedy solves the single pattern picking the smaller of F1_j(x0), F2_j(x0).
DisjSolution solve_disjunctive(const DisjunctiveNlp& disj, const Vector& x0, const SolverOptions& opts = {},
                               DisjMode mode = DisjMode::Enumerate);

}  // namespace mpcc
