#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpcc/disjunctive.hpp"

namespace mpcc {

/// 0.0001 for scholtes, 0.01 otherwise.
double default_shrink(RegKind kind);

struct HomotopyParams {
  double t0 = 1.0;
  double t_min = 1e-15;
  double eps = 1e-6;
  /// Zero selects default_shrink(kind).
  double shrink = 0.0;
  RegKind kind = RegKind::Disjunctive;
  double beta = 2.0;
  SolverOptions solver;
  DisjMode mode = DisjMode::Enumerate;

  double effective_shrink() const { return shrink > 0.0 ? shrink : default_shrink(kind); }
  /// Throws ParameterError.
  void validate() const;
};

enum class Termination { TargetMet, TFloor, SubproblemFailure };

std::string to_string(Termination reason);

struct TraceEntry {
  int k = 0;
  double t = 0.0;
  Vector start;
  Vector x;
  double maxvio = 0.0;
  NlpStatus status = NlpStatus::Converged;
  double millis = 0.0;
};

struct RunTrace {
  std::vector<TraceEntry> entries;
  Vector x;
  double objective = 0.0;
  double maxvio = 0.0;
  Termination reason = Termination::TFloor;
  double millis = 0.0;
};

/// Largest shrink^l * t_k >= t_min (l >= 1) at which x_next is infeasible for R; nullopt if none.
std::optional<double> update_t(const MpccProblem& problem, double t_k, const Vector& x_next, RegKind kind,
                               double shrink, double t_min, double beta = 2.0);

/// One subproblem R(t) solved from x0.
struct SubproblemResult {
  Vector x;
  NlpStatus status = NlpStatus::NumericalFailure;
};

SubproblemResult solve_subproblem(const MpccProblem& problem, double t, const Vector& x0, const HomotopyParams& params);

RunTrace run_homotopy(const MpccProblem& problem, const HomotopyParams& params);
RunTrace run_homotopy(const MpccProblem& problem, const HomotopyParams& params, const Vector& x0);

/// Header k,t,x1..xn,maxvio,status,millis; reals with 17 significant digits.
std::string trace_csv(const RunTrace& trace);

}  // namespace mpcc
