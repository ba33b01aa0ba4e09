#include "mpcc/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpcc/errors.hpp"
#include "mpcc/qp.hpp"

namespace mpcc {

std::string to_string(NlpStatus status) {
  switch (status) {
    case NlpStatus::Converged:
      return "converged";
    case NlpStatus::MaxIter:
      return "max-iter";
    case NlpStatus::Infeasible:
      return "infeasible";
    case NlpStatus::NumericalFailure:
      return "numerical-failure";
  }
  return "";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct State {
  Vector x;
  double f = 0.0;
  Vector grad;
  Vector cin;
  Matrix Jin;
  Vector ceq;
  Matrix Jeq;
};

State evaluate_state(const SmoothNlp& nlp, const Vector& x) {
  const auto n = static_cast<Eigen::Index>(nlp.n);
  State s;
  s.x = x;
  s.f = nlp.objective.value(x);
  s.grad = nlp.objective.gradient(x);
  s.cin.resize(static_cast<Eigen::Index>(nlp.ineq.size()));
  s.Jin.resize(static_cast<Eigen::Index>(nlp.ineq.size()), n);
  for (std::size_t i = 0; i < nlp.ineq.size(); ++i) {
    FunctionValue v = nlp.ineq[i].evaluate(x);
    s.cin[static_cast<Eigen::Index>(i)] = v.value;
    s.Jin.row(static_cast<Eigen::Index>(i)) = v.gradient.transpose();
  }
  s.ceq.resize(static_cast<Eigen::Index>(nlp.eq.size()));
  s.Jeq.resize(static_cast<Eigen::Index>(nlp.eq.size()), n);
  for (std::size_t i = 0; i < nlp.eq.size(); ++i) {
    FunctionValue v = nlp.eq[i].evaluate(x);
    s.ceq[static_cast<Eigen::Index>(i)] = v.value;
    s.Jeq.row(static_cast<Eigen::Index>(i)) = v.gradient.transpose();
  }
  return s;
}

bool finite_state(const State& s) {
  return std::isfinite(s.f) && s.grad.allFinite() && s.cin.allFinite() && s.Jin.allFinite() && s.ceq.allFinite() &&
         s.Jeq.allFinite();
}

double violation_of(const State& s) {
  double v = 0.0;
  if (s.cin.size() > 0) v = std::max(v, (-s.cin).maxCoeff());
  if (s.ceq.size() > 0) v = std::max(v, s.ceq.cwiseAbs().maxCoeff());
  return v;
}

double residual_of(const State& s, const Vector& lin, const Vector& leq) {
  Vector st = s.grad - s.Jin.transpose() * lin - s.Jeq.transpose() * leq;
  double r = st.size() > 0 ? st.cwiseAbs().maxCoeff() : 0.0;
  r = std::max(r, violation_of(s));
  for (Eigen::Index i = 0; i < lin.size(); ++i) {
    r = std::max(r, std::abs(lin[i] * s.cin[i]));
    r = std::max(r, -lin[i]);
  }
  return r;
}

double merit(const State& s, const Vector& w_in, const Vector& w_eq) {
  double m = s.f;
  for (Eigen::Index i = 0; i < s.cin.size(); ++i) m += w_in[i] * std::max(0.0, -s.cin[i]);
  for (Eigen::Index i = 0; i < s.ceq.size(); ++i) m += w_eq[i] * std::abs(s.ceq[i]);
  return m;
}

/// Merit-model decrease predicted by the linearization along d.
double merit_slope(const State& s, const Vector& d, const Vector& w_in, const Vector& w_eq) {
  double D = s.grad.dot(d);
  Vector lin = s.cin + s.Jin * d;
  Vector leq = s.ceq + s.Jeq * d;
  for (Eigen::Index i = 0; i < s.cin.size(); ++i)
    D += w_in[i] * (std::max(0.0, -lin[i]) - std::max(0.0, -s.cin[i]));
  for (Eigen::Index i = 0; i < s.ceq.size(); ++i) D += w_eq[i] * (std::abs(leq[i]) - std::abs(s.ceq[i]));
  return D;
}

struct Subproblem {
  Vector d;
  Vector lin;
  Vector leq;
  bool ok = false;
};

Subproblem solve_subproblem(const State& s, const Matrix& B, const Vector& bin, const Vector& beq) {
  const Eigen::Index n = B.rows();
  Subproblem out;
  QpProblem qp{B, s.grad, s.Jeq, beq, s.Jin, bin};
  QpResult r = solve_qp(qp);
  if (r.status == QpStatus::Optimal) {
    out.d = r.x;
    out.lin = r.uin;
    out.leq = r.ueq;
    out.ok = true;
    return out;
  }
  // Elastic variant: violated linearizations are relaxed by (1 - delta), delta in [0, 1].
  const Eigen::Index mi = s.Jin.rows();
  const Eigen::Index me = s.Jeq.rows();
  double rho = 1e4 * std::max(1.0, B.cwiseAbs().maxCoeff());
  QpProblem el;
  el.G = Matrix::Zero(n + 1, n + 1);
  el.G.topLeftCorner(n, n) = B;
  el.G(n, n) = rho;
  el.g = Vector::Zero(n + 1);
  el.g.head(n) = s.grad;
  el.Aeq = Matrix::Zero(me, n + 1);
  el.beq = beq;
  for (Eigen::Index i = 0; i < me; ++i) {
    el.Aeq.row(i).head(n) = s.Jeq.row(i);
    el.Aeq(i, n) = -beq[i];
  }
  el.Ain = Matrix::Zero(mi + 2, n + 1);
  el.bin = Vector::Zero(mi + 2);
  for (Eigen::Index i = 0; i < mi; ++i) {
    el.Ain.row(i).head(n) = s.Jin.row(i);
    if (bin[i] < 0) el.Ain(i, n) = -bin[i];
    el.bin[i] = bin[i];
  }
  el.Ain(mi, n) = 1.0;
  el.Ain(mi + 1, n) = -1.0;
  el.bin[mi + 1] = 1.0;
  QpResult re = solve_qp(el);
  if (re.status != QpStatus::Optimal) return out;
  out.d = re.x.head(n);
  out.lin = re.uin.head(mi);
  out.leq = re.ueq;
  out.ok = true;
  return out;
}

}  // namespace

double kkt_residual(const SmoothNlp& nlp, const Vector& x, const Vector& multipliers) {
  if (static_cast<std::size_t>(multipliers.size()) != nlp.constraint_count())
    throw DimensionError("multiplier vector has the wrong length");
  State s = evaluate_state(nlp, x);
  const auto mi = static_cast<Eigen::Index>(nlp.ineq.size());
  return residual_of(s, multipliers.head(mi), multipliers.tail(multipliers.size() - mi));
}

NlpSolution solve_nlp(const SmoothNlp& nlp, const Vector& x0, const SolverOptions& opts) {
  const auto n = static_cast<Eigen::Index>(nlp.n);
  if (x0.size() != n) throw DimensionError("start point has the wrong dimension");
  const auto mi = static_cast<Eigen::Index>(nlp.ineq.size());
  const auto me = static_cast<Eigen::Index>(nlp.eq.size());

  NlpSolution sol;
  sol.x = x0;
  sol.multipliers = Vector::Zero(mi + me);

  State s;
  try {
    s = evaluate_state(nlp, x0);
  } catch (const EvaluationError&) {
    return sol;
  }
  if (!finite_state(s)) return sol;

  Matrix B = Matrix::Identity(n, n);
  bool fresh_B = true;
  Vector w_in = Vector::Zero(mi);
  Vector w_eq = Vector::Zero(me);
  Vector lin = Vector::Zero(mi);
  Vector leq = Vector::Zero(me);

  auto finish = [&](NlpStatus status, int iterations) {
    sol.x = s.x;
    sol.objective = s.f;
    sol.multipliers << lin, leq;
    sol.kkt_residual = residual_of(s, lin, leq);
    sol.iterations = iterations;
    sol.status = status;
    if (status == NlpStatus::Converged &&
        (sol.kkt_residual > opts.kkt_tol || violation_of(s) > opts.feas_tol))
      sol.status = NlpStatus::MaxIter;
    return sol;
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    Subproblem sp = solve_subproblem(s, B, s.cin, s.ceq);
    if (!sp.ok) {
      if (!fresh_B) {
        B = Matrix::Identity(n, n);
        fresh_B = true;
        continue;
      }
      return finish(violation_of(s) > opts.feas_tol ? NlpStatus::Infeasible : NlpStatus::MaxIter, iter);
    }
    lin = sp.lin;
    leq = sp.leq;

    if (residual_of(s, lin, leq) <= opts.kkt_tol && violation_of(s) <= opts.feas_tol)
      return finish(NlpStatus::Converged, iter);

    const Vector& d = sp.d;
    if (d.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + s.x.cwiseAbs().maxCoeff())) {
      NlpStatus st = violation_of(s) > opts.feas_tol ? NlpStatus::Infeasible : NlpStatus::MaxIter;
      return finish(st, iter);
    }

    for (Eigen::Index i = 0; i < mi; ++i) w_in[i] = std::max(std::abs(lin[i]), 0.5 * (w_in[i] + std::abs(lin[i])));
    for (Eigen::Index i = 0; i < me; ++i) w_eq[i] = std::max(std::abs(leq[i]), 0.5 * (w_eq[i] + std::abs(leq[i])));

    const double phi0 = merit(s, w_in, w_eq);
    const double noise = 10.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(phi0));
    double D = merit_slope(s, d, w_in, w_eq);
    if (D >= 0) D = -d.dot(B * d);

    auto trial = [&](const Vector& xt, State& out) {
      try {
        out = evaluate_state(nlp, xt);
      } catch (const EvaluationError&) {
        return kInf;
      }
      if (!finite_state(out)) return kInf;
      return merit(out, w_in, w_eq);
    };

    State next;
    bool accepted = false;
    double alpha = 1.0;
    double phi = trial(s.x + d, next);
    if (phi <= phi0 + opts.armijo * D + noise) {
      accepted = true;
    } else if (std::isfinite(phi)) {
      // second-order correction
      Vector bin = next.cin - s.Jin * d;
      Vector beq = next.ceq - s.Jeq * d;
      QpProblem qp{B, s.grad, s.Jeq, beq, s.Jin, bin};
      QpResult soc = solve_qp(qp);
      if (soc.status == QpStatus::Optimal) {
        State corrected;
        double phic = trial(s.x + soc.x, corrected);
        if (phic <= phi0 + opts.armijo * D + noise) {
          next = corrected;
          accepted = true;
        }
      }
    }
    while (!accepted) {
      double denom = 2.0 * (phi - phi0 - alpha * D);
      double a_new = std::isfinite(phi) && denom > 0 ? -D * alpha * alpha / denom : 0.1 * alpha;
      alpha = std::clamp(a_new, 0.1 * alpha, 0.5 * alpha);
      if (alpha < opts.min_step) break;
      phi = trial(s.x + alpha * d, next);
      if (phi <= phi0 + opts.armijo * alpha * D + noise) accepted = true;
    }
    if (!accepted) {
      if (!fresh_B) {
        B = Matrix::Identity(n, n);
        fresh_B = true;
        continue;
      }
      return finish(violation_of(s) > opts.feas_tol ? NlpStatus::Infeasible : NlpStatus::MaxIter, iter);
    }

    // damped BFGS on the Lagrangian gradient
    Vector step = next.x - s.x;
    Vector y = (next.grad - next.Jin.transpose() * lin - next.Jeq.transpose() * leq) -
               (s.grad - s.Jin.transpose() * lin - s.Jeq.transpose() * leq);
    Vector Bs = B * step;
    double sBs = step.dot(Bs);
    if (sBs > 1e-300 && step.cwiseAbs().maxCoeff() > 0) {
      double sy = step.dot(y);
      if (sy < 0.2 * sBs) {
        double theta = 0.8 * sBs / (sBs - sy);
        y = theta * y + (1.0 - theta) * Bs;
        sy = step.dot(y);
      }
      if (sy > 0) {
        B += y * y.transpose() / sy - Bs * Bs.transpose() / sBs;
        B = 0.5 * (B + B.transpose());
        fresh_B = false;
      }
    }

    s = std::move(next);
    if (s.x.cwiseAbs().maxCoeff() > opts.unbounded_norm || s.f < -1e20) return finish(NlpStatus::NumericalFailure, iter + 1);
  }
  return finish(NlpStatus::MaxIter, opts.max_iter);
}

KsMultipliers ks_multipliers(const SmoothNlp& ks, const Vector& multipliers) {
  std::size_t kappa = 0;
  for (const auto& c : ks.ineq)
    if (c.tag.kind == Provenance::KsPhi) ++kappa;
  KsMultipliers m{Vector::Zero(static_cast<Eigen::Index>(kappa)), Vector::Zero(static_cast<Eigen::Index>(kappa)),
                  Vector::Zero(static_cast<Eigen::Index>(kappa))};
  for (std::size_t i = 0; i < ks.ineq.size(); ++i) {
    const auto& tag = ks.ineq[i].tag;
    auto j = static_cast<Eigen::Index>(tag.index);
    double v = multipliers[static_cast<Eigen::Index>(i)];
    if (tag.kind == Provenance::KsPhi) m.mu[j] = v;
    if (tag.kind == Provenance::LowerF1) m.mu1[j] = v;
    if (tag.kind == Provenance::LowerF2) m.mu2[j] = v;
  }
  return m;
}

EpsilonReport epsilon_stationarity_check(const SmoothNlp& ks, const Vector& x, const KsMultipliers& m, double eps) {
  if (ks.kind != RegKind::KanzowSchwartz) throw ParameterError("epsilon-stationarity is defined for KS(t) problems");
  EpsilonReport rep;
  Vector st = ks.objective.gradient(x);
  for (const auto& c : ks.ineq) {
    auto j = static_cast<Eigen::Index>(c.tag.index);
    if (c.tag.kind == Provenance::Side) continue;
    FunctionValue v = c.evaluate(x);
    double mult = 0.0;
    switch (c.tag.kind) {
      case Provenance::KsPhi:
        // constraint stores -Phi
        st += m.mu[j] * (-v.gradient);
        rep.feasibility = std::max(rep.feasibility, -v.value);
        rep.complementarity = std::max(rep.complementarity, std::abs(m.mu[j] * v.value));
        mult = m.mu[j];
        break;
      case Provenance::LowerF1:
        st -= m.mu1[j] * v.gradient;
        rep.feasibility = std::max(rep.feasibility, -v.value);
        rep.complementarity = std::max(rep.complementarity, std::abs(m.mu1[j] * v.value));
        mult = m.mu1[j];
        break;
      case Provenance::LowerF2:
        st -= m.mu2[j] * v.gradient;
        rep.feasibility = std::max(rep.feasibility, -v.value);
        rep.complementarity = std::max(rep.complementarity, std::abs(m.mu2[j] * v.value));
        mult = m.mu2[j];
        break;
      default:
        break;
    }
    rep.sign = std::max(rep.sign, -mult);
  }
  rep.stationarity = st.cwiseAbs().maxCoeff();
  const double bound = eps * (1.0 + 1e-12);
  if (rep.stationarity > bound) rep.violated.push_back("ekkt1");
  if (rep.feasibility > bound) rep.violated.push_back("ekkt2");
  if (rep.sign > bound) rep.violated.push_back("ekkt3");
  if (rep.complementarity > bound) rep.violated.push_back("ekkt4");
  rep.pass = rep.violated.empty();
  return rep;
}

}  // namespace mpcc
