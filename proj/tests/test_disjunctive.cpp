#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "helpers.hpp"
#include "mpcc/disjunctive.hpp"
#include "mpcc/errors.hpp"

using namespace mpcc;
using testing_util::shared_corpus;
using testing_util::vec;

namespace {

DisjMultipliers zero_multipliers(Eigen::Index kappa) {
  DisjMultipliers m;
  for (Vector* v : {&m.zeta1, &m.zeta2, &m.eta1, &m.eta2, &m.nu1, &m.nu2}) *v = Vector::Zero(kappa);
  m.side_ineq = Vector::Zero(0);
  m.side_eq = Vector::Zero(0);
  return m;
}

}  // namespace

TEST(Disjunctive, ExampleFiveFromOneOne) {
  DisjSolution s = solve_disjunctive(disjunctive(shared_corpus("example5"), 0.5), vec({1, 1}));
  ASSERT_EQ(s.status, NlpStatus::Converged);
  EXPECT_NEAR(s.x[0], 0, 1e-8);
  EXPECT_NEAR(s.x[1], 0, 1e-8);
  EXPECT_TRUE(s.sets.h12.empty());
  EXPECT_NEAR(s.multipliers.nu1[0], 1, 1e-8);
  EXPECT_NEAR(s.multipliers.nu2[0], 1, 1e-8);
  EXPECT_EQ(s.stationarity, Stationarity::S);
}

TEST(Disjunctive, ExampleOneClosedForm) {
  const double t = 0.1;
  DisjSolution s = solve_disjunctive(disjunctive(shared_corpus("example1"), t), vec({0.1, 0.2, 0.1, 1}));
  ASSERT_EQ(s.status, NlpStatus::Converged);
  EXPECT_LE((s.x - vec({t, 2 * t, t, 1})).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(s.multipliers.eta1[0], 1.2, 1e-6);
  EXPECT_NEAR(s.multipliers.eta1[1], 0.1, 1e-6);
  EXPECT_EQ(s.stationarity, Stationarity::S);
}

TEST(Disjunctive, ExampleTwoClosedFormBothModes) {
  auto p = shared_corpus("example2");
  for (DisjMode mode : {DisjMode::Enumerate, DisjMode::Greedy}) {
    DisjSolution s = solve_disjunctive(disjunctive(p, 0.1), p->start, {}, mode);
    ASSERT_EQ(s.status, NlpStatus::Converged) << to_string(mode);
    EXPECT_LE((s.x - vec({0.05, 0.05, 1})).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(s.multipliers.eta1[1], 0.9, 1e-6);
    EXPECT_NEAR(s.multipliers.nu1[2], 2, 1e-6);
  }
}

TEST(Disjunctive, RecoveryAtExampleOneAndFour) {
  const double t = 0.1;
  DisjMultipliers m1 = recover_disj_multipliers(disjunctive(shared_corpus("example1"), t), vec({t, 2 * t, t, 1}));
  EXPECT_NEAR(m1.eta1[0], 1.2, 1e-12);
  EXPECT_NEAR(m1.eta1[1], 0.1, 1e-12);
  EXPECT_LE(m1.residual, 1e-9);
  EXPECT_TRUE(m1.licq);
  DisjMultipliers m4 = recover_disj_multipliers(disjunctive(shared_corpus("example4"), t), vec({t, t, 0, 1}));
  EXPECT_NEAR(m4.eta1[1], 0.8, 1e-12);
  EXPECT_NEAR(m4.nu1[0], 0.2, 1e-12);
  EXPECT_NEAR(m4.nu2[0], 0.1, 1e-12);
  EXPECT_LE(m4.residual, 1e-9);
}

TEST(Disjunctive, UnconstrainedStationaryPointHasZeroMultipliers) {
  auto p = std::make_shared<const MpccProblem>(parse_problem("vars x1 x2\nobjective (x1 - 0.2)^2\npair (x1, x2)\n"));
  DisjMultipliers m = recover_disj_multipliers(disjunctive(p, 1.0), vec({0.2, 0.5}));
  for (const Vector* v : {&m.zeta1, &m.zeta2, &m.eta1, &m.eta2, &m.nu1, &m.nu2}) EXPECT_TRUE(v->isZero(0));
  EXPECT_EQ(m.residual, 0);
}

TEST(Disjunctive, Licq) {
  EXPECT_TRUE(disj_licq(disjunctive(shared_corpus("example5"), 0.5), vec({0, 0})).full_rank);
  auto dup = std::make_shared<const MpccProblem>(
      parse_problem("vars x1 x2\nobjective x1 + x2\npair (x1, x2)\npair (x1, x2)\n"));
  RankReport r = disj_licq(disjunctive(dup, 0.5), vec({0, 0.2}));
  EXPECT_FALSE(r.full_rank);
  EXPECT_EQ(r.columns, 2);
  EXPECT_EQ(r.rank, 1);
  DisjMultipliers m = recover_disj_multipliers(disjunctive(dup, 0.5), vec({0, 0.2}));
  EXPECT_FALSE(m.licq);
}

TEST(Disjunctive, LicqNearMpccLicqPoints) {
  auto p = shared_corpus("example1");
  for (double t : {1e-2, 1e-4}) EXPECT_TRUE(disj_licq(disjunctive(p, t), vec({t, 2 * t, t, 1})).full_rank);
}

TEST(Disjunctive, ClassifyDefinitions) {
  DisjActiveSets none;
  DisjMultipliers m = zero_multipliers(1);
  EXPECT_EQ(classify_disj_stationarity(m, none), Stationarity::S);
  DisjActiveSets corner;
  corner.h12 = {0};
  m.zeta1[0] = 1;
  EXPECT_EQ(classify_disj_stationarity(m, corner), Stationarity::M);
  m.zeta2[0] = 1;
  EXPECT_EQ(classify_disj_stationarity(m, corner), Stationarity::C);
  m.zeta2[0] = -1;
  EXPECT_EQ(classify_disj_stationarity(m, corner), Stationarity::None);
  DisjActiveSets upper;
  upper.h1 = {0};
  DisjMultipliers e = zero_multipliers(1);
  e.eta1[0] = -0.5;
  EXPECT_EQ(classify_disj_stationarity(e, upper), Stationarity::None);
  e.eta1[0] = -1e-7;
  EXPECT_EQ(classify_disj_stationarity(e, upper), Stationarity::S);
}

TEST(Disjunctive, EnumerationDominatesGreedy) {
  for (const char* name : {"prototype", "example1", "example2", "example4", "example5", "example6", "ex9.2.2",
                           "ralph1", "scholtes4", "kth1"}) {
    auto p = shared_corpus(name);
    for (double t : {1.0, 0.1, 0.01}) {
      DisjunctiveNlp d = disjunctive(p, t);
      DisjSolution full = solve_disjunctive(d, p->start, {}, DisjMode::Enumerate);
      DisjSolution greedy = solve_disjunctive(d, p->start, {}, DisjMode::Greedy);
      if (greedy.status != NlpStatus::Converged) continue;
      ASSERT_EQ(full.status, NlpStatus::Converged) << name << " " << t;
      EXPECT_LE(full.objective, greedy.objective + 1e-8 * (1 + std::abs(greedy.objective))) << name << " " << t;
      EXPECT_LE(d.violation(full.x), 1e-8) << name;
      if (full.stationarity != Stationarity::None) {
        DisjMultipliers again = recover_disj_multipliers(d, full.x, full.sets);
        EXPECT_LE(again.residual, 1e-6) << name;
      }
    }
  }
}

TEST(Disjunctive, SolutionInvariantsHold) {
  for (const char* name : {"example1", "example2", "example4", "example5", "prototype"}) {
    auto p = shared_corpus(name);
    DisjSolution s = solve_disjunctive(disjunctive(p, 0.1), p->start);
    EXPECT_EQ(s.pattern.size(), p->kappa());
    EXPECT_GE(s.feasible_patterns, 1) << name;
    if (s.stationarity == Stationarity::S)
      for (auto j : s.sets.h12) {
        EXPECT_NEAR(s.multipliers.zeta1[static_cast<Eigen::Index>(j)], 0, 1e-6);
        EXPECT_NEAR(s.multipliers.zeta2[static_cast<Eigen::Index>(j)], 0, 1e-6);
      }
  }
}

TEST(Disjunctive, EnumerationCap) {
  std::string text = "vars";
  for (int i = 1; i <= 13; ++i) text += " x" + std::to_string(i);
  text += "\nobjective x1\n";
  for (int i = 1; i <= 13; ++i) text += "pair (x" + std::to_string(i) + ", 1)\n";
  auto p = std::make_shared<const MpccProblem>(parse_problem(text));
  EXPECT_THROW(solve_disjunctive(disjunctive(p, 0.5), p->start), ParameterError);
  DisjSolution g = solve_disjunctive(disjunctive(p, 0.5), Vector::Constant(13, 0.1), {}, DisjMode::Greedy);
  EXPECT_EQ(g.pattern.size(), 13u);
}

TEST(Disjunctive, ModeNames) {
  EXPECT_EQ(parse_disj_mode("greedy"), DisjMode::Greedy);
  EXPECT_EQ(to_string(DisjMode::Enumerate), "enumerate");
  EXPECT_THROW(parse_disj_mode("random"), ParameterError);
  EXPECT_EQ(to_string(Stationarity::None), "none");
}
