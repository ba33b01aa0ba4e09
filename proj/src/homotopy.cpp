#include "mpcc/homotopy.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "mpcc/errors.hpp"

namespace mpcc {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double default_shrink(RegKind kind) { return kind == RegKind::Scholtes ? 1e-4 : 1e-2; }

void HomotopyParams::validate() const {
  const double s = effective_shrink();
  if (!(s > 0.0 && s < 1.0)) throw ParameterError("shrink must lie in (0, 1)");
  if (!(t_min > 0.0)) throw ParameterError("t_min must be positive");
  if (!(t_min <= t0)) throw ParameterError("t_min must not exceed t0");
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  if (kind == RegKind::QuadrantPenalty && !(beta > 1.0)) throw ParameterError("beta must exceed 1");
}

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::TargetMet:
      return "target-met";
    case Termination::TFloor:
      return "t-floor";
    case Termination::SubproblemFailure:
      return "subproblem-failure";
  }
  return "";
}

std::optional<double> update_t(const MpccProblem& problem, double t_k, const Vector& x_next, RegKind kind,
                               double shrink, double t_min, double beta) {
  double t = t_k * shrink;
  while (t >= t_min) {
    if (!regularized_feasible(problem, kind, t, x_next, kActivationTol, beta)) return t;
    t *= shrink;
  }
  return std::nullopt;
}

SubproblemResult solve_subproblem(const MpccProblem& problem, double t, const Vector& x0,
                                  const HomotopyParams& params) {
  SubproblemResult r;
  if (params.kind == RegKind::Disjunctive) {
    auto shared = std::shared_ptr<const MpccProblem>(&problem, [](const MpccProblem*) {});
    DisjSolution s = solve_disjunctive(disjunctive(shared, t), x0, params.solver, params.mode);
    r.x = s.x;
    r.status = s.status;
    return r;
  }
  SmoothNlp nlp = params.kind == RegKind::Scholtes         ? scholtes(problem, t)
                  : params.kind == RegKind::KanzowSchwartz ? kanzow_schwartz(problem, t)
                                                           : quadrant_penalty(problem, t, params.beta);
  NlpSolution s = solve_nlp(nlp, x0, params.solver);
  r.x = s.x;
  r.status = s.status;
  return r;
}

RunTrace run_homotopy(const MpccProblem& problem, const HomotopyParams& params) {
  return run_homotopy(problem, params, problem.start);
}

RunTrace run_homotopy(const MpccProblem& problem, const HomotopyParams& params, const Vector& x0) {
  params.validate();
  if (static_cast<std::size_t>(x0.size()) != problem.n) throw DimensionError("start point has the wrong dimension");
  using Clock = std::chrono::steady_clock;
  const auto run_start = Clock::now();

  RunTrace trace;
  Vector x = x0;
  double t = params.t0;
  int failures = 0;
  for (int k = 0;; ++k) {
    TraceEntry e;
    e.k = k;
    e.t = t;
    e.start = x;
    const auto t0 = Clock::now();
    SubproblemResult r = solve_subproblem(problem, t, x, params);
    e.millis = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    e.status = r.status;
    e.x = r.x.allFinite() ? r.x : x;
    e.maxvio = maxvio(problem, e.x);
    trace.entries.push_back(e);
    x = e.x;

    failures = r.status == NlpStatus::NumericalFailure ? failures + 1 : 0;
    if (failures >= 2) {
      trace.reason = Termination::SubproblemFailure;
      const TraceEntry* best = &trace.entries.front();
      for (const auto& entry : trace.entries)
        if (entry.maxvio < best->maxvio) best = &entry;
      x = best->x;
      break;
    }
    if (e.maxvio <= params.eps) {
      trace.reason = Termination::TargetMet;
      break;
    }
    auto next = update_t(problem, t, x, params.kind, params.effective_shrink(), params.t_min, params.beta);
    if (!next) {
      trace.reason = Termination::TFloor;
      break;
    }
    t = *next;
  }
  trace.x = x;
  trace.objective = problem.objective.value(x);
  trace.maxvio = maxvio(problem, x);
  trace.millis = std::chrono::duration<double, std::milli>(Clock::now() - run_start).count();
  return trace;
}

std::string trace_csv(const RunTrace& trace) {
  std::ostringstream os;
  const Eigen::Index n = trace.entries.empty() ? trace.x.size() : trace.entries.front().x.size();
  os << "k,t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
  os << ",maxvio,status,millis\n";
  for (const auto& e : trace.entries) {
    os << e.k << "," << num(e.t);
    for (Eigen::Index i = 0; i < e.x.size(); ++i) os << "," << num(e.x[i]);
    os << "," << num(e.maxvio) << "," << to_string(e.status) << "," << num(e.millis) << "\n";
  }
  return os.str();
}

}  // namespace mpcc
