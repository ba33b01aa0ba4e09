#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mpcc/errors.hpp"
#include "mpcc/regularize.hpp"

using namespace mpcc;
using testing_util::corpus;
using testing_util::vec;

TEST(KsPhi, Branches) {
  PhiValue p = ks_phi(1, 1);
  EXPECT_EQ(p.value, 1);
  EXPECT_EQ(p.gradient[0], 1);
  EXPECT_EQ(p.gradient[1], 1);
  PhiValue q = ks_phi(-1, -2);
  EXPECT_EQ(q.value, -2.5);
  EXPECT_EQ(q.gradient[0], 1);
  EXPECT_EQ(q.gradient[1], 2);
  PhiValue o = ks_phi(0, 0);
  EXPECT_EQ(o.value, 0);
  EXPECT_EQ(o.gradient[0], 0);
  EXPECT_EQ(o.gradient[1], 0);
  for (double a : {-3.0, -0.5, 0.7, 2.0}) EXPECT_DOUBLE_EQ(ks_phi(a, -a).value, -a * a);
}

TEST(KsPhi, ContinuousAcrossSwitchingLine) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-5, 5);
  const double d = 1e-12;
  for (int k = 0; k < 1000; ++k) {
    double a = U(rng);
    PhiValue above = ks_phi(a, -a + d);
    PhiValue below = ks_phi(a, -a - d);
    EXPECT_LE(std::abs(above.value - below.value), 1e-9);
    EXPECT_LE(std::abs(above.gradient[0] - below.gradient[0]), 1e-9);
    EXPECT_LE(std::abs(above.gradient[1] - below.gradient[1]), 1e-9);
  }
}

TEST(QuadrantPenalty, Branches) {
  EXPECT_EQ(quadrant_penalty_g(-1, -7, 2), 0);
  EXPECT_EQ(quadrant_penalty_g(1, 4, 2), 0);
  EXPECT_EQ(quadrant_penalty_g(1, -4, 2), 1);
  EXPECT_EQ(quadrant_penalty_g(4, -1, 2), 1);
  EXPECT_NEAR(quadrant_penalty_g(1, -1, 2), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(quadrant_penalty_g(1, -1, 1.0), ParameterError);
}

TEST(QuadrantPenalty, ContinuousOnEveryBoundary) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(1e-3, 10);
  std::uniform_real_distribution<double> B(1.1, 6);
  const double d = 1e-13;
  for (int k = 0; k < 1000; ++k) {
    double beta = B(rng);
    double u = U(rng);
    double s = U(rng);
    struct Probe {
      double u1, v1, u2, v2;
    };
    Probe probes[] = {
        {u, -beta * u * (1 - d), u, -beta * u * (1 + d)},
        {u, -u / beta * (1 - d), u, -u / beta * (1 + d)},
        {d, -s, -d, -s},
        {s, d, s, -d},
    };
    for (const auto& p : probes) {
      FunctionValue a = quadrant_penalty_eval(p.u1, p.v1, beta);
      FunctionValue b = quadrant_penalty_eval(p.u2, p.v2, beta);
      EXPECT_LE(std::abs(a.value - b.value), 1e-9);
      EXPECT_LE((a.gradient - b.gradient).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(QuadrantPenalty, NonnegativeAndZeroExactlyOnLogicalRegion) {
  for (double u = -3; u <= 3; u += 0.125)
    for (double v = -3; v <= 3; v += 0.125) {
      double g = quadrant_penalty_g(u, v, 2);
      EXPECT_GE(g, 0);
      EXPECT_EQ(g == 0, u <= 0 || v >= 0) << u << " " << v;
    }
}

TEST(QuadrantPenalty, DerivativesMatchFiniteDifferences) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-4, 4);
  const double h = 1e-6;
  for (int k = 0; k < 500; ++k) {
    double u = U(rng), v = U(rng);
    FunctionValue f = quadrant_penalty_eval(u, v, 2.5);
    double gu = (quadrant_penalty_g(u + h, v, 2.5) - quadrant_penalty_g(u - h, v, 2.5)) / (2 * h);
    double gv = (quadrant_penalty_g(u, v + h, 2.5) - quadrant_penalty_g(u, v - h, 2.5)) / (2 * h);
    EXPECT_NEAR(f.gradient[0], gu, 1e-6 * std::max(1.0, std::abs(gu)));
    EXPECT_NEAR(f.gradient[1], gv, 1e-6 * std::max(1.0, std::abs(gv)));
  }
}

TEST(Regularize, ScholtesMembership) {
  MpccProblem p = corpus("prototype");
  SmoothNlp s = scholtes(p, 1.0);
  EXPECT_TRUE(s.feasible(vec({0.5, 0.5}), 0));
  EXPECT_FALSE(s.feasible(vec({2, 1}), 1e-9));
  EXPECT_DOUBLE_EQ(s.violation(vec({2, 1})), 1.0);
  EXPECT_EQ(s.ineq.size(), 3u);
  EXPECT_THROW(scholtes(p, 0.0), ParameterError);
  EXPECT_THROW(kanzow_schwartz(p, -1.0), ParameterError);
  EXPECT_THROW(disjunctive(p, 0.0), ParameterError);
  EXPECT_THROW(quadrant_penalty(p, 1.0, 0.5), ParameterError);
}

TEST(Regularize, KsMembershipAndDegenerateGradient) {
  MpccProblem p = corpus("prototype");
  SmoothNlp ks = kanzow_schwartz(p, 1.0);
  EXPECT_TRUE(ks.feasible(vec({0.5, 0.5}), 0));
  auto it = std::find_if(ks.ineq.begin(), ks.ineq.end(), [](const Constraint& c) { return c.tag.kind == Provenance::KsPhi; });
  ASSERT_NE(it, ks.ineq.end());
  const Constraint& phi = *it;
  EXPECT_DOUBLE_EQ(phi.value(vec({0.5, 0.5})), 0.25);
  FunctionValue at_corner = phi.evaluate(vec({1, 1}));
  EXPECT_EQ(at_corner.value, 0);
  EXPECT_TRUE(at_corner.gradient.isZero(0));
}

TEST(Regularize, DisjunctiveAndQpfMembership) {
  MpccProblem p = corpus("prototype");
  DisjunctiveNlp d = disjunctive(p, 1.0);
  SmoothNlp q = quadrant_penalty(p, 1.0, 2.0);
  EXPECT_TRUE(d.feasible(vec({0.5, 5}), 0));
  EXPECT_FALSE(d.feasible(vec({2, 3}), 1e-9));
  EXPECT_EQ(q.eq.front().value(vec({0.5, 5})), 0);
  EXPECT_GT(q.eq.front().value(vec({2, 3})), 0);
  EXPECT_TRUE(q.feasible(vec({0.5, 5}), 0));
  EXPECT_FALSE(q.feasible(vec({2, 3}), 1e-9));
}

TEST(Regularize, FeasibleSetsCoincideOnRandomPoints) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> U(-1, 6);
  for (const char* name : {"prototype", "example2", "ex9.2.2"}) {
    MpccProblem p = corpus(name);
    for (double t : {1.0, 0.1}) {
      SmoothNlp ks = kanzow_schwartz(p, t);
      SmoothNlp q = quadrant_penalty(p, t);
      DisjunctiveNlp d = disjunctive(p, t);
      for (int k = 0; k < 2000; ++k) {
        Vector x(static_cast<Eigen::Index>(p.n));
        for (auto& xi : x) xi = U(rng);
        bool in_d = d.feasible(x, 1e-12);
        EXPECT_EQ(ks.feasible(x, 1e-12), in_d);
        EXPECT_EQ(q.feasible(x, 1e-12), in_d);
      }
    }
  }
}

TEST(Regularize, MpccPointsBelongToEveryRelaxation) {
  MpccProblem p = corpus("example1");
  for (auto x : {vec({0, 0, 0, 1}), vec({3, 0, 0, 0}), vec({0, 2, 1, 0})}) {
    ASSERT_EQ(maxvio(p, x), 0);
    for (double t : {1.0, 1e-3})
      for (auto kind : {RegKind::Scholtes, RegKind::KanzowSchwartz, RegKind::Disjunctive, RegKind::QuadrantPenalty})
        EXPECT_TRUE(regularized_feasible(p, kind, t, x, 0.0));
  }
}

TEST(Regularize, ConstraintGradientsMatchFiniteDifferences) {
  MpccProblem p = corpus("example2");
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> U(-1, 3);
  const double h = 1e-6;
  std::vector<SmoothNlp> nlps = {scholtes(p, 0.3), kanzow_schwartz(p, 0.3), quadrant_penalty(p, 0.3, 3.0),
                                 disjunctive(p, 0.3).branch_nlp({Branch::A, Branch::B, Branch::A})};
  for (const auto& nlp : nlps) {
    for (int k = 0; k < 100; ++k) {
      Vector x(3);
      for (auto& xi : x) xi = U(rng);
      auto check = [&](const Constraint& c) {
        FunctionValue v = c.evaluate(x);
        EXPECT_DOUBLE_EQ(v.value, c.value(x));
        for (int i = 0; i < 3; ++i) {
          Vector xp = x, xm = x;
          xp[i] += h;
          xm[i] -= h;
          double fd = (c.value(xp) - c.value(xm)) / (2 * h);
          EXPECT_NEAR(v.gradient[i], fd, 1e-6 * std::max(1.0, std::abs(fd))) << to_string(c.tag.kind);
          Vector hd = (c.evaluate(xp).gradient - c.evaluate(xm).gradient) / (2 * h);
          for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(v.hessian(j, i), hd[j], 1e-5 * std::max(1.0, std::abs(hd[j]))) << to_string(c.tag.kind);
        }
      };
      for (const auto& c : nlp.ineq) check(c);
      for (const auto& c : nlp.eq) check(c);
    }
  }
}

TEST(Regularize, ProvenanceCoversEveryPair) {
  MpccProblem p = corpus("ex9.2.2");
  for (const SmoothNlp& nlp : {scholtes(p, 1), kanzow_schwartz(p, 1), quadrant_penalty(p, 1)}) {
    std::vector<int> lower1(3), lower2(3), pair(3);
    int side = 0;
    auto visit = [&](const Constraint& c) {
      switch (c.tag.kind) {
        case Provenance::LowerF1: ++lower1.at(c.tag.index); break;
        case Provenance::LowerF2: ++lower2.at(c.tag.index); break;
        case Provenance::Side: ++side; break;
        default: ++pair.at(c.tag.index); break;
      }
    };
    for (const auto& c : nlp.ineq) visit(c);
    for (const auto& c : nlp.eq) visit(c);
    EXPECT_EQ(lower1, std::vector<int>(3, 1));
    EXPECT_EQ(lower2, std::vector<int>(3, 1));
    EXPECT_EQ(pair, std::vector<int>(3, 1));
    EXPECT_EQ(side, 4);
  }
}

TEST(DisjActiveSets, ExampleOneAtXt) {
  auto p = testing_util::shared_corpus("example1");
  const double t = 0.1;
  DisjActiveSets s = disj_active_sets(disjunctive(p, t), vec({t, 2 * t, t, 1}));
  EXPECT_EQ(s.h1, (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(s.h12.empty() && s.h2.empty() && s.n1.empty() && s.n2.empty());
}

TEST(DisjActiveSets, ExampleFiveOrigin) {
  auto p = testing_util::shared_corpus("example5");
  DisjActiveSets s = disj_active_sets(disjunctive(p, 0.5), vec({0, 0}));
  EXPECT_EQ(s.n1, std::vector<std::size_t>{0});
  EXPECT_EQ(s.n2, std::vector<std::size_t>{0});
  EXPECT_TRUE(s.h12.empty() && s.h1.empty() && s.h2.empty());
  DisjActiveSets corner = disj_active_sets(disjunctive(p, 0.5), vec({0.5, 0.5}));
  EXPECT_EQ(corner.h12, std::vector<std::size_t>{0});
  EXPECT_THROW(disj_active_sets(disjunctive(p, 0.5), vec({1, 1})), ClassificationRefused);
}

TEST(Regularize, ParseRegKind) {
  EXPECT_EQ(parse_reg_kind("ks"), RegKind::KanzowSchwartz);
  EXPECT_EQ(to_string(RegKind::QuadrantPenalty), "qpf");
  try {
    parse_reg_kind("bogus");
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("scholtes"), std::string::npos);
  }
}
