#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mpcc/disjunctive.hpp"

namespace mpcc {

inline constexpr double kSignTol = 1e-6;
inline constexpr double kResidualTol = 1e-6;

/// grad f = sum_a01 s1 dF1 + sum_a10 s2 dF2 + sum_a00 (r1 dF1 + r2 dF2) + sum l dg + sum m dh.
/// Vectors have length kappa; entries outside their active set are zero.
struct MpccMultipliers {
  Vector sigma1, sigma2, rho1, rho2;
  Vector side_ineq, side_eq;
  ActiveSets sets;
  double residual = 0.0;
  bool licq = true;
};

/// Rank test on {dF1_j : a01 u a00} u {dF2_j : a10 u a00} u active side gradients.
RankReport mpcc_licq(const MpccProblem& problem, const Vector& x, double tol = kActivationTol);

Matrix mpcc_active_gradients(const MpccProblem& problem, const Vector& x, const ActiveSets& sets);

MpccMultipliers recover_mpcc_multipliers(const MpccProblem& problem, const Vector& x, double tol = kActivationTol);

Stationarity classify_mpcc_stationarity(const MpccMultipliers& m, double tol = kSignTol);

struct SignedActiveSets {
  std::vector<std::size_t> a01_minus, a01_zero, a01_plus;
  std::vector<std::size_t> a10_minus, a10_zero, a10_plus;
  std::vector<std::size_t> a00_minus, a00_zero, a00_plus;
  /// Biactive pairs with strictly opposite signs; empty at C-stationary points.
  std::vector<std::size_t> a00_mixed;
  double tol = kSignTol;
};

SignedActiveSets signed_subsets(const MpccMultipliers& m, double tol = kSignTol);

struct TangentBasis {
  Matrix basis;  // n x dimension, orthonormal columns
  Eigen::Index dimension = 0;
};

/// Orthonormal basis of {xi : a^T xi = 0 for every column a}.
TangentBasis tangent_basis(const Matrix& active_gradients, double tol = kActivationTol);

struct IndexReport {
  std::string kind;  // "mpcc" or "disj"
  bool licq = true;
  bool nd1 = true, nd2 = true, nd3 = true, nd4 = true;
  bool has_nd4 = true;
  /// False when LICQ fails: multipliers are minimum-norm and indices are indicative only.
  bool reliable = true;
  Stationarity stationarity = Stationarity::None;
  int qi = 0;
  int bi = 0;
  int ci = 0;
  int shift = 0;
  double residual = 0.0;
  Eigen::Index tangent_dimension = 0;
  Vector eigenvalues;
};

/// Hessian of the MPCC Lagrangian f - sum s dF - sum r dF - sum l g - sum m h.
Matrix mpcc_lagrangian_hessian(const MpccProblem& problem, const Vector& x, const MpccMultipliers& m);
/// Hessian of f + sum z F + sum e F - sum n F - sum l g - sum m h over the D(t) multipliers.
Matrix disj_lagrangian_hessian(const DisjunctiveNlp& disj, const Vector& x, const DisjMultipliers& m);

IndexReport mpcc_c_index(const MpccProblem& problem, const Vector& x, const MpccMultipliers& m,
                         double tol = kSignTol);
IndexReport disj_c_index(const DisjunctiveNlp& disj, const Vector& x, const DisjMultipliers& m,
                         double tol = kSignTol);

/// Convenience: recover, classify and index in one call.
IndexReport analyze_mpcc_point(const MpccProblem& problem, const Vector& x);
IndexReport analyze_disj_point(const DisjunctiveNlp& disj, const Vector& x);

struct DiagnosticCheck {
  std::string name;
  double t = 0.0;
  bool pass = true;
  /// Whether the assumptions that make the check mandatory hold.
  bool assumptions_hold = true;
  std::string detail;

  bool consistent() const { return pass || !assumptions_hold; }
};

struct TrajectoryReport {
  IndexReport limit;
  MpccMultipliers limit_multipliers;
  std::vector<IndexReport> entries;
  std::vector<DiagnosticCheck> checks;

  bool all_pass() const;
  bool all_consistent() const;
};

/// runs must be sorted by decreasing t.
TrajectoryReport trajectory_diagnostics(const MpccProblem& problem,
                                        const std::vector<std::pair<double, DisjSolution>>& runs,
                                        const Vector& limit);

/// key: value lines.
std::string to_text(const IndexReport& report);
std::string to_text(const TrajectoryReport& report);
/// One-line summary, e.g. "class=C QI=0 BI=1 CI=1 ND4=true".
std::string summary_line(const IndexReport& report);

/// Parses key: value lines; later keys overwrite earlier ones.
std::map<std::string, std::string> parse_report(const std::string& text);

}  // namespace mpcc
