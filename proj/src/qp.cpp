#include "mpcc/qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace mpcc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Factor {
  Matrix J;  // L^{-T} Q
  Matrix R;  // q x q upper triangular
};

}  // namespace

QpResult solve_qp(const QpProblem& qp, int max_iterations) {
  const Eigen::Index n = qp.G.rows();
  const Eigen::Index me = qp.Aeq.rows();
  const Eigen::Index mi = qp.Ain.rows();
  if (max_iterations <= 0) max_iterations = static_cast<int>(50 * (n + me + mi) + 100);

  QpResult res;
  res.ueq = Vector::Zero(me);
  res.uin = Vector::Zero(mi);

  Eigen::LLT<Matrix> llt(qp.G);
  if (llt.info() != Eigen::Success) return res;
  Matrix Linv = llt.matrixL().solve(Matrix::Identity(n, n));

  Vector x = -llt.solve(qp.g);
  std::vector<Eigen::Index> active;  // ids: [0, me) equalities, [me, me+mi) inequalities
  std::vector<double> u;

  auto normal = [&](Eigen::Index id) -> Vector {
    return id < me ? Vector(qp.Aeq.row(id).transpose()) : Vector(qp.Ain.row(id - me).transpose());
  };
  auto constant = [&](Eigen::Index id) { return id < me ? qp.beq[id] : qp.bin[id - me]; };

  auto factor = [&]() {
    const auto q = static_cast<Eigen::Index>(active.size());
    Factor f;
    if (q == 0) {
      f.J = Linv.transpose();
      f.R = Matrix(0, 0);
      return f;
    }
    Matrix N(n, q);
    for (Eigen::Index k = 0; k < q; ++k) N.col(k) = normal(active[static_cast<std::size_t>(k)]);
    Matrix M = Linv * N;
    Eigen::HouseholderQR<Matrix> qr(M);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    f.R = qr.matrixQR().topRows(q).triangularView<Eigen::Upper>();
    f.J = Linv.transpose() * Q;
    return f;
  };

  struct Step {
    Vector z;
    Vector r;
    bool dependent = false;
  };
  auto step_direction = [&](const Vector& np) {
    Factor f = factor();
    const auto q = static_cast<Eigen::Index>(active.size());
    Vector d = f.J.transpose() * np;
    Step s;
    s.z = f.J.rightCols(n - q) * d.tail(n - q);
    s.r = q > 0 ? Vector(f.R.triangularView<Eigen::Upper>().solve(d.head(q))) : Vector(0);
    double total = d.squaredNorm();
    s.dependent = d.tail(n - q).squaredNorm() <= 1e-20 * total || total == 0.0;
    return s;
  };

  const double feas_tol = 1e-12;

  for (Eigen::Index i = 0; i < me; ++i) {
    Vector np = normal(i);
    Step s = step_direction(np);
    double viol = np.dot(x) + qp.beq[i];
    double scale = 1.0 + std::abs(qp.beq[i]) + np.cwiseAbs().dot(x.cwiseAbs());
    if (s.dependent) {
      if (std::abs(viol) <= 1e-10 * scale) continue;
      res.status = QpStatus::Infeasible;
      return res;
    }
    double t2 = -viol / s.z.dot(np);
    x += t2 * s.z;
    for (std::size_t k = 0; k < active.size(); ++k) u[k] -= t2 * s.r[static_cast<Eigen::Index>(k)];
    active.push_back(i);
    u.push_back(t2);
  }

  int iter = 0;
  for (;;) {
    if (++iter > max_iterations) return res;
    Eigen::Index ip = -1;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < mi; ++i) {
      bool is_active = false;
      for (auto id : active) is_active = is_active || id == me + i;
      if (is_active) continue;
      double s = qp.Ain.row(i).dot(x) + qp.bin[i];
      double scale = 1.0 + std::abs(qp.bin[i]) + qp.Ain.row(i).cwiseAbs().dot(x.cwiseAbs().transpose());
      if (s < -feas_tol * scale && s / scale < worst) {
        worst = s / scale;
        ip = i;
      }
    }
    if (ip < 0) break;

    const Eigen::Index id = me + ip;
    Vector np = normal(id);
    double u_plus = 0.0;
    for (;;) {
      if (++iter > max_iterations) return res;
      Step s = step_direction(np);
      double t1 = kInf;
      std::size_t drop = 0;
      double rmax = s.r.size() > 0 ? s.r.cwiseAbs().maxCoeff() : 0.0;
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (active[k] < me) continue;
        double rk = s.r[static_cast<Eigen::Index>(k)];
        if (rk > 1e-13 * (1.0 + rmax)) {
          double ratio = u[k] / rk;
          if (ratio < t1) {
            t1 = ratio;
            drop = k;
          }
        }
      }
      double t2 = kInf;
      if (!s.dependent) {
        double zn = s.z.dot(np);
        if (zn > 0) t2 = -(np.dot(x) + constant(id)) / zn;
      }
      double t = std::min(t1, t2);
      if (t == kInf) {
        res.status = QpStatus::Infeasible;
        return res;
      }
      if (t2 == kInf) {
        for (std::size_t k = 0; k < active.size(); ++k) u[k] -= t * s.r[static_cast<Eigen::Index>(k)];
        u_plus += t;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
        u.erase(u.begin() + static_cast<std::ptrdiff_t>(drop));
        continue;
      }
      x += t * s.z;
      for (std::size_t k = 0; k < active.size(); ++k) u[k] -= t * s.r[static_cast<Eigen::Index>(k)];
      u_plus += t;
      if (t2 <= t1) {
        active.push_back(id);
        u.push_back(u_plus);
        break;
      }
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
      u.erase(u.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }

  for (std::size_t k = 0; k < active.size(); ++k) {
    if (active[k] < me) {
      res.ueq[active[k]] = u[k];
    } else {
      res.uin[active[k] - me] = std::max(0.0, u[k]);
    }
  }
  res.x = x;
  res.iterations = iter;
  res.status = QpStatus::Optimal;
  return res;
}

}  // namespace mpcc
