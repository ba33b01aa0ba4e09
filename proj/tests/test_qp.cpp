#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpcc/qp.hpp"
#include "qp_oracle.hpp"

using namespace mpcc;
using namespace testing_util;

TEST(Qp, UnconstrainedMinimizer) {
  QpProblem qp;
  qp.G = Matrix::Identity(2, 2) * 2;
  qp.g = Vector::Constant(2, -2);
  qp.Aeq.resize(0, 2);
  qp.beq.resize(0);
  qp.Ain.resize(0, 2);
  qp.bin.resize(0);
  QpResult r = solve_qp(qp);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x[0], 1, 1e-14);
  EXPECT_NEAR(r.x[1], 1, 1e-14);
}

TEST(Qp, ActiveBoundHasPositiveMultiplier) {
  QpProblem qp;
  qp.G = Matrix::Identity(1, 1);
  qp.g = Vector::Constant(1, 1);
  qp.Aeq.resize(0, 1);
  qp.beq.resize(0);
  qp.Ain = Matrix::Identity(1, 1);
  qp.bin = Vector::Zero(1);
  QpResult r = solve_qp(qp);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x[0], 0, 1e-14);
  EXPECT_NEAR(r.uin[0], 1, 1e-14);
}

TEST(Qp, DetectsInconsistentConstraints) {
  QpProblem qp;
  qp.G = Matrix::Identity(1, 1);
  qp.g = Vector::Zero(1);
  qp.Aeq.resize(0, 1);
  qp.beq.resize(0);
  qp.Ain.resize(2, 1);
  qp.Ain << 1, -1;
  qp.bin = Vector::Constant(2, -1);
  EXPECT_EQ(solve_qp(qp).status, QpStatus::Infeasible);
}

TEST(Qp, MatchesActiveSetEnumeration) {
  std::mt19937 rng(2024);
  int solved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int n = 2 + trial % 4;
    int me = trial % 3 == 0 ? 1 : 0;
    int mi = 1 + trial % 6;
    QpProblem qp = random_qp(rng, n, me, mi);
    OracleResult oracle = enumerate_active_sets(qp);
    QpResult r = solve_qp(qp);
    if (!oracle.feasible) {
      EXPECT_NE(r.status, QpStatus::Optimal) << trial;
      continue;
    }
    ASSERT_EQ(r.status, QpStatus::Optimal) << trial;
    EXPECT_NEAR(qp_value(qp, r.x), oracle.value, 1e-8 * (1 + std::abs(oracle.value))) << trial;
    EXPECT_LE((r.x - oracle.x).cwiseAbs().maxCoeff(), 1e-6) << trial;
    Vector stat = qp.G * r.x + qp.g - qp.Aeq.transpose() * r.ueq - qp.Ain.transpose() * r.uin;
    EXPECT_LE(stat.cwiseAbs().maxCoeff(), 1e-8) << trial;
    EXPECT_GE(r.uin.minCoeff(), -1e-12) << trial;
    Vector slack = qp.Ain * r.x + qp.bin;
    for (Eigen::Index i = 0; i < slack.size(); ++i) EXPECT_LE(std::abs(slack[i] * r.uin[i]), 1e-8) << trial;
    ++solved;
  }
  EXPECT_GT(solved, 100);
}
