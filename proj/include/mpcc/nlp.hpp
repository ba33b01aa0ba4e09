#pragma once

#include <string>
#include <vector>

#include "mpcc/regularize.hpp"

namespace mpcc {

struct SolverOptions {
  double kkt_tol = 1e-9;
  double feas_tol = 1e-9;
  int max_iter = 200;
  double armijo = 1e-4;
  double min_step = 1e-12;
  /// Iterates beyond this norm are treated as unbounded descent.
  double unbounded_norm = 1e10;
};

enum class NlpStatus { Converged, MaxIter, Infeasible, NumericalFailure };

std::string to_string(NlpStatus status);

struct NlpSolution {
  Vector x;
  /// One entry per constraint: inequalities first, then equalities. Zero when inactive.
  Vector multipliers;
  NlpStatus status = NlpStatus::NumericalFailure;
  double kkt_residual = 0.0;
  double objective = 0.0;
  int iterations = 0;
};

/// SQP with damped BFGS, an L1 merit line search with second-order correction,
/// and an elastic fallback for inconsistent linearizations.
NlpSolution solve_nlp(const SmoothNlp& nlp, const Vector& x0, const SolverOptions& opts = {});

/// max of stationarity (inf-norm), feasibility, complementarity and sign violations.
/// Stationarity uses grad f = sum lambda_i grad c_i over c_i >= 0 and c_i = 0.
double kkt_residual(const SmoothNlp& nlp, const Vector& x, const Vector& multipliers);

struct KsMultipliers {
  Vector mu;  // Phi_j(x,t) <= 0
  Vector mu1;  // F1_j >= 0
  Vector mu2;  // F2_j >= 0
};

/// Reads solver multipliers of a KS(t) problem into (mu, mu1, mu2).
KsMultipliers ks_multipliers(const SmoothNlp& ks, const Vector& multipliers);

struct EpsilonReport {
  bool pass = false;
  double stationarity = 0.0;  // (ekkt1)
  double feasibility = 0.0;  // (ekkt2): max of Phi_j and -F_ij
  double sign = 0.0;  // (ekkt3): max of -multiplier
  double complementarity = 0.0;  // (ekkt4)
  std::vector<std::string> violated;
};

EpsilonReport epsilon_stationarity_check(const SmoothNlp& ks, const Vector& x, const KsMultipliers& m, double eps);

}  // namespace mpcc
