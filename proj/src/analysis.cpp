#include "mpcc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <sstream>

#include "mpcc/errors.hpp"

namespace mpcc {

namespace {

using Index = std::vector<std::size_t>;

Eigen::Index ix(std::size_t j) { return static_cast<Eigen::Index>(j); }

std::string fmt(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string yes(bool b) { return b ? "true" : "false"; }

std::string list(const Index& s) {
  std::string out = "{";
  for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k] + 1);
  return out + "}";
}

Index sorted(Index s) {
  std::sort(s.begin(), s.end());
  return s;
}

bool subset(const Index& a, const Index& b) {
  Index sa = sorted(a), sb = sorted(b);
  return std::includes(sb.begin(), sb.end(), sa.begin(), sa.end());
}

Index difference(const Index& a, const Index& b) {
  Index sa = sorted(a), sb = sorted(b), out;
  std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
  return out;
}

Index intersection(const Index& a, const Index& b) {
  Index sa = sorted(a), sb = sorted(b), out;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
  return out;
}

struct Inertia {
  Vector eigenvalues;
  int negative = 0;
  bool singular = false;
};

Inertia restricted_inertia(const Matrix& hessian, const TangentBasis& tb) {
  Inertia in;
  if (tb.dimension == 0) {
    in.eigenvalues = Vector(0);
    return in;
  }
  Matrix H = tb.basis.transpose() * hessian * tb.basis;
  H = 0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  in.eigenvalues = es.eigenvalues();
  double radius = in.eigenvalues.cwiseAbs().maxCoeff();
  double threshold = 1e-7 * (1.0 + radius);
  for (Eigen::Index i = 0; i < in.eigenvalues.size(); ++i) {
    if (in.eigenvalues[i] < -threshold) ++in.negative;
    if (std::abs(in.eigenvalues[i]) <= threshold) in.singular = true;
  }
  return in;
}

}  // namespace

Matrix mpcc_active_gradients(const MpccProblem& problem, const Vector& x, const ActiveSets& sets) {
  std::vector<Vector> cols;
  for (auto j : sets.a01) cols.push_back(problem.pairs[j].first.gradient(x));
  for (auto j : sets.a10) cols.push_back(problem.pairs[j].second.gradient(x));
  for (auto j : sets.a00) {
    cols.push_back(problem.pairs[j].first.gradient(x));
    cols.push_back(problem.pairs[j].second.gradient(x));
  }
  for (auto i : sets.ineq) cols.push_back(problem.side_ineq[i].gradient(x));
  for (const auto& h : problem.side_eq) cols.push_back(h.gradient(x));
  Matrix A(ix(problem.n), ix(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) A.col(ix(k)) = cols[k];
  return A;
}

RankReport mpcc_licq(const MpccProblem& problem, const Vector& x, double tol) {
  ActiveSets sets = active_sets(problem, x, tol);
  return rank_test(mpcc_active_gradients(problem, x, sets), tol);
}

MpccMultipliers recover_mpcc_multipliers(const MpccProblem& problem, const Vector& x, double tol) {
  MpccMultipliers m;
  m.sets = active_sets(problem, x, tol);
  const auto kappa = ix(problem.kappa());
  m.sigma1 = m.sigma2 = m.rho1 = m.rho2 = Vector::Zero(kappa);
  m.side_ineq = Vector::Zero(ix(problem.side_ineq.size()));
  m.side_eq = Vector::Zero(ix(problem.side_eq.size()));

  Matrix A = mpcc_active_gradients(problem, x, m.sets);
  Vector g = problem.objective.gradient(x);
  m.licq = rank_test(A, tol).full_rank;
  if (A.cols() == 0) {
    m.residual = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    return m;
  }
  Vector sol = A.completeOrthogonalDecomposition().solve(g);
  m.residual = (A * sol - g).cwiseAbs().maxCoeff();
  Eigen::Index k = 0;
  for (auto j : m.sets.a01) m.sigma1[ix(j)] = sol[k++];
  for (auto j : m.sets.a10) m.sigma2[ix(j)] = sol[k++];
  for (auto j : m.sets.a00) {
    m.rho1[ix(j)] = sol[k++];
    m.rho2[ix(j)] = sol[k++];
  }
  for (auto i : m.sets.ineq) m.side_ineq[ix(i)] = sol[k++];
  for (std::size_t i = 0; i < problem.side_eq.size(); ++i) m.side_eq[ix(i)] = sol[k++];
  return m;
}

SignedActiveSets signed_subsets(const MpccMultipliers& m, double tol) {
  SignedActiveSets s;
  s.tol = tol;
  for (auto j : m.sets.a01) {
    double v = m.sigma1[ix(j)];
    (v < -tol ? s.a01_minus : v > tol ? s.a01_plus : s.a01_zero).push_back(j);
  }
  for (auto j : m.sets.a10) {
    double v = m.sigma2[ix(j)];
    (v < -tol ? s.a10_minus : v > tol ? s.a10_plus : s.a10_zero).push_back(j);
  }
  for (auto j : m.sets.a00) {
    double a = m.rho1[ix(j)], b = m.rho2[ix(j)];
    if (std::abs(a) <= tol || std::abs(b) <= tol)
      s.a00_zero.push_back(j);
    else if (a < 0 && b < 0)
      s.a00_minus.push_back(j);
    else if (a > 0 && b > 0)
      s.a00_plus.push_back(j);
    else
      s.a00_mixed.push_back(j);
  }
  return s;
}

Stationarity classify_mpcc_stationarity(const MpccMultipliers& m, double tol) {
  if (m.residual > kResidualTol) return Stationarity::None;
  for (auto i : m.sets.ineq)
    if (m.side_ineq[ix(i)] < -tol) return Stationarity::None;
  SignedActiveSets s = signed_subsets(m, tol);
  if (!s.a00_mixed.empty()) return Stationarity::None;
  if (!s.a00_minus.empty()) return Stationarity::C;
  for (auto j : s.a00_zero)
    if (m.rho1[ix(j)] < -tol || m.rho2[ix(j)] < -tol) return Stationarity::M;
  return Stationarity::S;
}

TangentBasis tangent_basis(const Matrix& active_gradients, double tol) {
  TangentBasis tb;
  const Eigen::Index n = active_gradients.rows();
  if (active_gradients.cols() == 0) {
    tb.basis = Matrix::Identity(n, n);
    tb.dimension = n;
    return tb;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(active_gradients);
  qr.setThreshold(tol);
  const Eigen::Index r = qr.rank();
  Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  tb.dimension = n - r;
  tb.basis = Q.rightCols(tb.dimension);
  return tb;
}

Matrix mpcc_lagrangian_hessian(const MpccProblem& problem, const Vector& x, const MpccMultipliers& m) {
  Matrix H = problem.objective.hessian(x);
  for (std::size_t j = 0; j < problem.kappa(); ++j) {
    double w1 = m.sigma1[ix(j)] + m.rho1[ix(j)];
    double w2 = m.sigma2[ix(j)] + m.rho2[ix(j)];
    if (w1 != 0.0) H -= w1 * problem.pairs[j].first.hessian(x);
    if (w2 != 0.0) H -= w2 * problem.pairs[j].second.hessian(x);
  }
  for (std::size_t i = 0; i < problem.side_ineq.size(); ++i)
    if (m.side_ineq[ix(i)] != 0.0) H -= m.side_ineq[ix(i)] * problem.side_ineq[i].hessian(x);
  for (std::size_t i = 0; i < problem.side_eq.size(); ++i)
    if (m.side_eq[ix(i)] != 0.0) H -= m.side_eq[ix(i)] * problem.side_eq[i].hessian(x);
  return H;
}

Matrix disj_lagrangian_hessian(const DisjunctiveNlp& disj, const Vector& x, const DisjMultipliers& m) {
  const auto& p = *disj.problem;
  Matrix H = p.objective.hessian(x);
  for (std::size_t j = 0; j < p.kappa(); ++j) {
    double w1 = m.zeta1[ix(j)] + m.eta1[ix(j)] - m.nu1[ix(j)];
    double w2 = m.zeta2[ix(j)] + m.eta2[ix(j)] - m.nu2[ix(j)];
    if (w1 != 0.0) H += w1 * p.pairs[j].first.hessian(x);
    if (w2 != 0.0) H += w2 * p.pairs[j].second.hessian(x);
  }
  for (std::size_t i = 0; i < p.side_ineq.size(); ++i)
    if (m.side_ineq[ix(i)] != 0.0) H -= m.side_ineq[ix(i)] * p.side_ineq[i].hessian(x);
  for (std::size_t i = 0; i < p.side_eq.size(); ++i)
    if (m.side_eq[ix(i)] != 0.0) H -= m.side_eq[ix(i)] * p.side_eq[i].hessian(x);
  return H;
}

IndexReport mpcc_c_index(const MpccProblem& problem, const Vector& x, const MpccMultipliers& m, double tol) {
  IndexReport r;
  r.kind = "mpcc";
  r.licq = r.nd1 = m.licq;
  r.reliable = m.licq;
  r.residual = m.residual;
  r.stationarity = classify_mpcc_stationarity(m, tol);

  SignedActiveSets s = signed_subsets(m, tol);
  r.nd2 = s.a00_zero.empty() && s.a00_mixed.empty();
  for (auto i : m.sets.ineq)
    if (std::abs(m.side_ineq[ix(i)]) <= tol) r.nd2 = false;
  r.nd4 = s.a01_zero.empty() && s.a10_zero.empty();
  r.shift = static_cast<int>(s.a01_zero.size() + s.a10_zero.size());

  TangentBasis tb = tangent_basis(mpcc_active_gradients(problem, x, m.sets));
  Inertia in = restricted_inertia(mpcc_lagrangian_hessian(problem, x, m), tb);
  r.tangent_dimension = tb.dimension;
  r.eigenvalues = in.eigenvalues;
  r.nd3 = !in.singular;
  r.qi = in.negative;
  r.bi = static_cast<int>(s.a00_minus.size());
  r.ci = r.qi + r.bi;
  return r;
}

IndexReport disj_c_index(const DisjunctiveNlp& disj, const Vector& x, const DisjMultipliers& m, double tol) {
  DisjActiveSets sets = disj_active_sets(disj, x);
  IndexReport r;
  r.kind = "disj";
  r.has_nd4 = false;
  r.licq = r.nd1 = m.licq;
  r.reliable = m.licq;
  r.residual = m.residual;
  r.stationarity = m.residual <= kResidualTol ? classify_disj_stationarity(m, sets, tol) : Stationarity::None;

  auto positive = [tol](const Vector& v, const Index& s) {
    for (auto j : s)
      if (v[ix(j)] <= tol) return false;
    return true;
  };
  r.nd2 = positive(m.zeta1, sets.h12) && positive(m.zeta2, sets.h12) && positive(m.eta1, sets.h1) &&
          positive(m.eta2, sets.h2) && positive(m.nu1, sets.n1) && positive(m.nu2, sets.n2) &&
          positive(m.side_ineq, sets.ineq);

  TangentBasis tb = tangent_basis(disj_active_gradients(disj, x, sets));
  Inertia in = restricted_inertia(disj_lagrangian_hessian(disj, x, m), tb);
  r.tangent_dimension = tb.dimension;
  r.eigenvalues = in.eigenvalues;
  r.nd3 = !in.singular;
  r.qi = in.negative;
  for (auto j : sets.h12)
    if (std::abs(m.zeta1[ix(j)]) > tol && std::abs(m.zeta2[ix(j)]) > tol) ++r.bi;
  r.ci = r.qi + r.bi;
  return r;
}

IndexReport analyze_mpcc_point(const MpccProblem& problem, const Vector& x) {
  return mpcc_c_index(problem, x, recover_mpcc_multipliers(problem, x));
}

IndexReport analyze_disj_point(const DisjunctiveNlp& disj, const Vector& x) {
  return disj_c_index(disj, x, recover_disj_multipliers(disj, x));
}

bool TrajectoryReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const DiagnosticCheck& c) { return c.pass; });
}

bool TrajectoryReport::all_consistent() const {
  return std::all_of(checks.begin(), checks.end(), [](const DiagnosticCheck& c) { return c.consistent(); });
}

TrajectoryReport trajectory_diagnostics(const MpccProblem& problem,
                                        const std::vector<std::pair<double, DisjSolution>>& runs,
                                        const Vector& limit) {
  TrajectoryReport rep;
  auto add = [&rep](std::string name, double t, bool pass, bool assumptions, std::string detail) {
    rep.checks.push_back({std::move(name), t, pass, assumptions, std::move(detail)});
  };

  try {
    rep.limit_multipliers = recover_mpcc_multipliers(problem, limit);
  } catch (const ClassificationRefused& e) {
    add("limit-feasible", 0.0, false, true, e.what());
    return rep;
  }
  const MpccMultipliers& lm = rep.limit_multipliers;
  rep.limit = mpcc_c_index(problem, limit, lm);
  const SignedActiveSets sg = signed_subsets(lm);
  const bool limit_ok = rep.limit.licq && rep.limit.stationarity != Stationarity::None;
  const bool nd2 = rep.limit.nd2;
  const bool nd4 = rep.limit.nd4;
  const bool limit_nondegenerate = rep.limit.nd1 && rep.limit.nd2 && rep.limit.nd3;

  for (std::size_t k = 1; k < runs.size(); ++k)
    if (!(runs[k].first < runs[k - 1].first))
      add("t-decreasing", runs[k].first, false, true, "runs are not sorted by decreasing t");

  std::vector<double> deviations;
  std::vector<double> ts;
  for (const auto& [t, sol] : runs) {
    DisjunctiveNlp disj = disjunctive(problem, t);
    DisjActiveSets ds;
    try {
      ds = disj_active_sets(disj, sol.x);
    } catch (const ClassificationRefused& e) {
      add("entry-feasible", t, false, true, e.what());
      continue;
    }
    DisjMultipliers dm = recover_disj_multipliers(disj, sol.x, ds);
    IndexReport er = disj_c_index(disj, sol.x, dm);
    rep.entries.push_back(er);
    const bool base = limit_ok && er.stationarity != Stationarity::None;

    const Index n1_only = difference(ds.n1, ds.n2);
    const Index n2_only = difference(ds.n2, ds.n1);
    const Index n12 = intersection(ds.n1, ds.n2);
    auto inclusion = [&](const std::string& name, const Index& a, const Index& b, const std::string& lhs,
                         const std::string& rhs) {
      add(name, t, subset(a, b), base, lhs + "=" + list(a) + " in " + rhs + "=" + list(b));
    };
    inclusion("inclusion-a", sg.a01_minus, ds.h1, "a01-", "H1");
    inclusion("inclusion-b", sg.a01_plus, n1_only, "a01+", "N1\\N2");
    inclusion("inclusion-c", sg.a10_minus, ds.h2, "a10-", "H2");
    inclusion("inclusion-d", sg.a10_plus, n2_only, "a10+", "N2\\N1");
    inclusion("inclusion-e", sg.a00_minus, ds.h12, "a00-", "H12");
    inclusion("inclusion-f", sg.a00_plus, n12, "a00+", "N1nN2");

    auto equality = [&](const std::string& name, const Index& a, const Index& b, bool assumptions,
                        const std::string& lhs, const std::string& rhs) {
      add(name, t, sorted(a) == sorted(b), base && assumptions, lhs + "=" + list(a) + " vs " + rhs + "=" + list(b));
    };
    if (nd2) {
      equality("equality-e", sg.a00_minus, ds.h12, true, "a00-", "H12");
      equality("equality-f", sg.a00_plus, n12, true, "a00+", "N1nN2");
    }
    if (nd2 && nd4) {
      equality("equality-a", sg.a01_minus, ds.h1, true, "a01-", "H1");
      equality("equality-b", sg.a01_plus, n1_only, true, "a01+", "N1\\N2");
      equality("equality-c", sg.a10_minus, ds.h2, true, "a10-", "H2");
      equality("equality-d", sg.a10_plus, n2_only, true, "a10+", "N2\\N1");
    }

    const int s = rep.limit.shift;
    const bool bound = std::max(er.qi - s, 0) <= rep.limit.qi && rep.limit.qi <= er.qi && rep.limit.bi == er.bi;
    const bool entry_nondegenerate = er.nd1 && er.nd2 && er.nd3;
    std::string detail = "DISJ-QI=" + std::to_string(er.qi) + " DISJ-BI=" + std::to_string(er.bi) +
                         " MPCC-QI=" + std::to_string(rep.limit.qi) + " MPCC-BI=" + std::to_string(rep.limit.bi) +
                         " s=" + std::to_string(s);
    if (rep.limit.qi < er.qi) detail += nd4 ? " shift with ND4 holding" : " shift explained by ND4 failure";
    if (!entry_nondegenerate) detail += " (D(t) point degenerate)";
    if (!limit_nondegenerate) detail += " (limit degenerate)";
    add("index-bound", t, bound, base && entry_nondegenerate && limit_nondegenerate, detail);

    double dev = 0.0;
    for (std::size_t j = 0; j < problem.kappa(); ++j) {
      auto in = [j](const Index& s) { return std::find(s.begin(), s.end(), j) != s.end(); };
      const Eigen::Index jj = ix(j);
      double ez1 = in(sg.a00_minus) ? lm.rho1[jj] : 0.0;
      double ez2 = in(sg.a00_minus) ? lm.rho2[jj] : 0.0;
      double ee1 = in(sg.a01_minus) ? lm.sigma1[jj] : 0.0;
      double ee2 = in(sg.a10_minus) ? lm.sigma2[jj] : 0.0;
      double en1 = in(sg.a01_plus) ? lm.sigma1[jj] : in(sg.a00_plus) ? lm.rho1[jj] : 0.0;
      double en2 = in(sg.a10_plus) ? lm.sigma2[jj] : in(sg.a00_plus) ? lm.rho2[jj] : 0.0;
      dev = std::max({dev, std::abs(-dm.zeta1[jj] - ez1), std::abs(-dm.zeta2[jj] - ez2),
                      std::abs(-dm.eta1[jj] - ee1), std::abs(-dm.eta2[jj] - ee2), std::abs(dm.nu1[jj] - en1),
                      std::abs(dm.nu2[jj] - en2)});
    }
    deviations.push_back(dev);
    ts.push_back(t);
  }

  if (!deviations.empty()) {
    const double t_final = ts.back();
    const double dev_final = deviations.back();
    const bool assumptions = limit_ok && nd2;
    add("multiplier-limit", t_final, dev_final <= 10.0 * t_final, assumptions,
        "deviation " + fmt(dev_final, 6) + " vs slack " + fmt(10.0 * t_final, 6) + (nd2 ? "" : " (ND2 fails)"));
    bool monotone = true;
    for (std::size_t k = 1; k < deviations.size(); ++k)
      if (deviations[k] > deviations[k - 1] + 1e-9) monotone = false;
    add("multiplier-trend", t_final, monotone, assumptions, monotone ? "nonincreasing deviation" : "deviation grows");
  }
  return rep;
}

std::string summary_line(const IndexReport& r) {
  std::string out = "class=" + to_string(r.stationarity) + " QI=" + std::to_string(r.qi) +
                    " BI=" + std::to_string(r.bi) + " CI=" + std::to_string(r.ci);
  if (r.has_nd4) out += " ND4=" + yes(r.nd4);
  return out;
}

std::string to_text(const IndexReport& r) {
  std::ostringstream os;
  os << "kind: " << r.kind << "\n";
  os << "class: " << to_string(r.stationarity) << "\n";
  os << "QI: " << r.qi << "\n";
  os << "BI: " << r.bi << "\n";
  os << "CI: " << r.ci << "\n";
  os << "LICQ: " << yes(r.licq) << "\n";
  os << "ND1: " << yes(r.nd1) << "\n";
  os << "ND2: " << yes(r.nd2) << "\n";
  os << "ND3: " << yes(r.nd3) << "\n";
  os << "ND4: " << (r.has_nd4 ? yes(r.nd4) : "n/a") << "\n";
  if (r.has_nd4) os << "shift: " << r.shift << "\n";
  os << "reliable: " << yes(r.reliable) << "\n";
  os << "residual: " << fmt(r.residual, 6) << "\n";
  os << "tangent_dim: " << r.tangent_dimension << "\n";
  os << "eigenvalues:";
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) os << " " << fmt(r.eigenvalues[i]);
  os << "\n";
  return os.str();
}

std::string to_text(const TrajectoryReport& rep) {
  std::ostringstream os;
  std::istringstream limit(to_text(rep.limit));
  for (std::string line; std::getline(limit, line);) os << "limit." << line << "\n";
  for (std::size_t k = 0; k < rep.entries.size(); ++k) os << "entry." << k << ": " << summary_line(rep.entries[k]) << "\n";
  for (std::size_t k = 0; k < rep.checks.size(); ++k) {
    const auto& c = rep.checks[k];
    os << "check." << k << "." << c.name << ": " << (c.pass ? "pass" : "fail") << " t=" << fmt(c.t, 6)
       << " assumptions=" << (c.assumptions_hold ? "hold" : "fail") << " " << c.detail << "\n";
  }
  os << "all_pass: " << yes(rep.all_pass()) << "\n";
  os << "all_consistent: " << yes(rep.all_consistent()) << "\n";
  return os.str();
}

std::map<std::string, std::string> parse_report(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    auto pos = line.find(": ");
    if (pos == std::string::npos) {
      if (!line.empty() && line.back() == ':') out[line.substr(0, line.size() - 1)] = "";
      continue;
    }
    out[line.substr(0, pos)] = line.substr(pos + 2);
  }
  return out;
}

}  // namespace mpcc
