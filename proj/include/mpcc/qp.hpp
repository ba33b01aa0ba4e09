#pragma once

#include "mpcc/expression.hpp"

namespace mpcc {

/// min 1/2 x'Gx + g'x  s.t.  Aeq x + beq = 0,  Ain x + bin >= 0,  G symmetric positive definite.
struct QpProblem {
  Matrix G;
  Vector g;
  Matrix Aeq;
  Vector beq;
  Matrix Ain;
  Vector bin;
};

enum class QpStatus { Optimal, Infeasible, Failed };

/// Multipliers satisfy Gx + g = Aeq' ueq + Ain' uin with uin >= 0.
struct QpResult {
  QpStatus status = QpStatus::Failed;
  Vector x;
  Vector ueq;
  Vector uin;
  int iterations = 0;
};

/// Dual active-set method of Goldfarb and Idnani.
QpResult solve_qp(const QpProblem& qp, int max_iterations = 0);

}  // namespace mpcc
