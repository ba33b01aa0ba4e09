#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mpcc/errors.hpp"
#include "mpcc/nlp.hpp"
#include "qp_oracle.hpp"

using namespace mpcc;
using testing_util::corpus;
using testing_util::vec;

namespace {

Vector multipliers_by_tag(const SmoothNlp& nlp, Provenance kind, double value) {
  Vector m = Vector::Zero(static_cast<Eigen::Index>(nlp.constraint_count()));
  for (std::size_t i = 0; i < nlp.ineq.size(); ++i)
    if (nlp.ineq[i].tag.kind == kind) m[static_cast<Eigen::Index>(i)] = value;
  return m;
}

SmoothNlp qp_as_nlp(const QpProblem& qp) {
  SmoothNlp nlp;
  nlp.n = static_cast<std::size_t>(qp.G.rows());
  nlp.kind = RegKind::Scholtes;
  const std::size_t n = nlp.n;
  Expression f = Expression::constant(0);
  for (std::size_t i = 0; i < n; ++i) {
    Expression xi = Expression::variable(i);
    f = f + Expression::constant(qp.g[static_cast<Eigen::Index>(i)]) * xi;
    for (std::size_t j = 0; j < n; ++j)
      f = f + Expression::constant(0.5 * qp.G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) * xi *
                  Expression::variable(j);
  }
  nlp.objective = CompiledExpression(f, n);
  auto affine = [](Vector a, double b) {
    return Constraint{{Provenance::Side, 0},
                      [a, b](const Vector& x) { return a.dot(x) + b; },
                      [a, b](const Vector& x) {
                        FunctionValue v;
                        v.value = a.dot(x) + b;
                        v.gradient = a;
                        v.hessian = Matrix::Zero(a.size(), a.size());
                        return v;
                      }};
  };
  for (Eigen::Index i = 0; i < qp.Ain.rows(); ++i) nlp.ineq.push_back(affine(qp.Ain.row(i).transpose(), qp.bin[i]));
  for (Eigen::Index i = 0; i < qp.Aeq.rows(); ++i) nlp.eq.push_back(affine(qp.Aeq.row(i).transpose(), qp.beq[i]));
  return nlp;
}

}  // namespace

TEST(Nlp, InteriorOptimumHasZeroMultiplier) {
  MpccProblem p = parse_problem("vars x1\nobjective (x1 - 1)^2\npair (x1, 5)\n");
  SmoothNlp nlp = scholtes(p, 100);
  NlpSolution s = solve_nlp(nlp, vec({0}));
  ASSERT_EQ(s.status, NlpStatus::Converged);
  EXPECT_NEAR(s.x[0], 1, 1e-8);
  for (auto m : s.multipliers) EXPECT_EQ(m, 0);
  EXPECT_LE(kkt_residual(nlp, s.x, s.multipliers), 1e-9);
}

TEST(Nlp, ScholtesExampleEightReachesSqrtT) {
  MpccProblem p = corpus("example8");
  NlpSolution s = solve_nlp(scholtes(p, 0.01), vec({1, 1}));
  ASSERT_EQ(s.status, NlpStatus::Converged);
  EXPECT_NEAR(s.x[0], 0.1, 1e-6);
  EXPECT_NEAR(s.x[1], 0.1, 1e-6);
}

TEST(Nlp, KsExampleSixReachesOriginWithZeroMultiplier) {
  MpccProblem p = corpus("example6");
  for (double t : {0.1, 0.01, 0.001}) {
    SmoothNlp ks = kanzow_schwartz(p, t);
    NlpSolution s = solve_nlp(ks, vec({0.1, 0.1}));
    ASSERT_EQ(s.status, NlpStatus::Converged) << t;
    EXPECT_NEAR(s.x[0], 0, 1e-8);
    EXPECT_NEAR(s.x[1], 0, 1e-8);
    KsMultipliers m = ks_multipliers(ks, s.multipliers);
    EXPECT_NEAR(m.mu1[0], 0, 1e-8);
  }
}

TEST(Nlp, KktResidualDefinitions) {
  MpccProblem p = parse_problem("vars x1\nobjective (x1 - 1)^2\npair (x1 - 2, 5)\n");
  SmoothNlp nlp = scholtes(p, 100);
  Vector exact = multipliers_by_tag(nlp, Provenance::LowerF1, 2.0);
  EXPECT_LE(kkt_residual(nlp, vec({2}), exact), 1e-15);
  Vector zero = Vector::Zero(static_cast<Eigen::Index>(nlp.constraint_count()));
  EXPECT_DOUBLE_EQ(kkt_residual(nlp, vec({3}), zero), 4.0);
  EXPECT_THROW(kkt_residual(nlp, vec({2}), Vector::Zero(1)), DimensionError);
}

TEST(Nlp, FritzJohnPointOfKsHasUnitResidual) {
  MpccProblem p = corpus("example8");
  const double t = 0.01;
  SmoothNlp ks = kanzow_schwartz(p, t);
  for (double mu : {0.0, 1.0, 1e6}) {
    Vector m = multipliers_by_tag(ks, Provenance::KsPhi, mu);
    EXPECT_DOUBLE_EQ(kkt_residual(ks, vec({t, t}), m), 1.0);
  }
}

TEST(Nlp, EpsilonStationarityOfExampleSeven) {
  MpccProblem p = corpus("example7");
  for (double t : {0.1, 0.01}) {
    const double eps = t * t;
    SmoothNlp ks = kanzow_schwartz(p, t);
    KsMultipliers m{Vector::Constant(1, 1 / eps), Vector::Zero(1), Vector::Zero(1)};
    EpsilonReport ok = epsilon_stationarity_check(ks, vec({t - eps, t - eps}), m, eps);
    EXPECT_TRUE(ok.pass) << t;
    EpsilonReport tight = epsilon_stationarity_check(ks, vec({t - eps, t - eps}), m, eps / 10);
    EXPECT_FALSE(tight.pass) << t;
  }
  SmoothNlp ks = kanzow_schwartz(p, 0.1);
  KsMultipliers zero{Vector::Zero(1), Vector::Zero(1), Vector::Zero(1)};
  EpsilonReport bad = epsilon_stationarity_check(ks, vec({-0.02, 0.05}), zero, 0.01);
  EXPECT_FALSE(bad.pass);
  EXPECT_NE(std::find(bad.violated.begin(), bad.violated.end(), "ekkt2"), bad.violated.end());
  EXPECT_THROW(epsilon_stationarity_check(scholtes(p, 0.1), vec({0, 0}), zero, 1), ParameterError);
}

TEST(Nlp, ExactKktPointPassesAtZeroEpsilon) {
  MpccProblem p = corpus("example6");
  SmoothNlp ks = kanzow_schwartz(p, 0.1);
  KsMultipliers zero{Vector::Zero(1), Vector::Zero(1), Vector::Zero(1)};
  EXPECT_TRUE(epsilon_stationarity_check(ks, vec({0, 0}), zero, 0).pass);
}

TEST(Nlp, ConvergedSolutionsCertifyIndependently) {
  for (const char* name : {"prototype", "example2", "example4", "ex9.2.2", "scholtes4"}) {
    MpccProblem p = corpus(name);
    for (const SmoothNlp& nlp : {scholtes(p, 0.1), kanzow_schwartz(p, 0.1), quadrant_penalty(p, 0.1)}) {
      NlpSolution s = solve_nlp(nlp, p.start);
      if (s.status != NlpStatus::Converged) continue;
      SolverOptions o;
      EXPECT_LE(kkt_residual(nlp, s.x, s.multipliers), o.kkt_tol) << name << " " << to_string(nlp.kind);
      EXPECT_LE(nlp.violation(s.x), o.feas_tol) << name;
      for (std::size_t i = 0; i < nlp.ineq.size(); ++i) {
        double mi = s.multipliers[static_cast<Eigen::Index>(i)];
        EXPECT_GE(mi, -o.kkt_tol) << name;
        EXPECT_LE(std::abs(mi * nlp.ineq[i].value(s.x)), o.kkt_tol) << name;
      }
    }
  }
}

TEST(Nlp, Deterministic) {
  MpccProblem p = corpus("ex9.2.2");
  SmoothNlp nlp = kanzow_schwartz(p, 0.01);
  NlpSolution a = solve_nlp(nlp, p.start);
  NlpSolution b = solve_nlp(nlp, p.start);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.multipliers, b.multipliers);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.status, b.status);
}

TEST(Nlp, WrongStartDimension) {
  MpccProblem p = corpus("prototype");
  EXPECT_THROW(solve_nlp(scholtes(p, 1), vec({1})), DimensionError);
}

TEST(Nlp, ConvexQpsMatchEnumerationOracle) {
  std::mt19937 rng(77);
  int compared = 0;
  for (int trial = 0; trial < 120; ++trial) {
    int n = 2 + trial % 3;
    int mi = 1 + trial % 6;
    QpProblem qp = testing_util::random_qp(rng, n, trial % 4 == 0 ? 1 : 0, mi);
    testing_util::OracleResult oracle = testing_util::enumerate_active_sets(qp);
    if (!oracle.feasible) continue;
    NlpSolution s = solve_nlp(qp_as_nlp(qp), Vector::Zero(n));
    ASSERT_EQ(s.status, NlpStatus::Converged) << trial;
    EXPECT_LE((s.x - oracle.x).cwiseAbs().maxCoeff(), 1e-8) << trial;
    ++compared;
  }
  EXPECT_GT(compared, 40);
}
