#include "flexcolloc/qp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace flexcolloc::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::LLT<Eigen::MatrixXd> factor_spd(Eigen::MatrixXd H) {
  const int n = static_cast<int>(H.rows());
  const double scale =
      n > 0 ? 1.0 + H.diagonal().cwiseAbs().maxCoeff() : 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  double reg = 1e-14 * scale;
  while (llt.info() != Eigen::Success && reg < 1e-2 * scale) {
    H.diagonal().array() += reg;
    llt.compute(H);
    reg *= 100.0;
  }
  return llt;
}

/// Dual active-set minimization of 0.5 w'Hw + g'w subject to C w >= d.
/// Starts from the unconstrained minimizer and adds the most violated
/// constraint at a time, taking dual (drop) steps when it blocks.
QpStatus dual_active_set(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                         const Eigen::MatrixXd& C, const Eigen::VectorXd& d,
                         int max_iter, Eigen::VectorXd& w, Eigen::VectorXd& lambda,
                         int& iterations) {
  const int n = static_cast<int>(H.rows());
  const int mi = static_cast<int>(C.rows());

  w = Eigen::VectorXd::Zero(n);
  lambda = Eigen::VectorXd::Zero(mi);
  const Eigen::LLT<Eigen::MatrixXd> llt = factor_spd(H);
  if (llt.info() != Eigen::Success) return QpStatus::Degenerate;
  w = llt.solve(-g);
  if (mi == 0) return QpStatus::Optimal;

  const double feas_tol = 1e-10 * (1.0 + d.cwiseAbs().maxCoeff());
  std::vector<int> active;
  std::vector<double> lam_act;
  Eigen::MatrixXd X(n, n);  // columns H^{-1} n_j for the active normals n_j
  Eigen::MatrixXd M(n, n);  // Gram matrix N' H^{-1} N of the active set
  int q = 0;

  iterations = 0;
  while (true) {
    Eigen::VectorXd s = C * w - d;
    int p = -1;
    double worst = -feas_tol;
    for (int j = 0; j < mi; ++j)
      if (s(j) < worst) {
        worst = s(j);
        p = j;
      }
    if (p < 0) {
      for (int j = 0; j < q; ++j) lambda(active[j]) = lam_act[j];
      return QpStatus::Optimal;
    }

    const Eigen::VectorXd np = C.row(p).transpose();
    const Eigen::VectorXd h = llt.solve(np);
    double lam_p = 0.0;

    while (true) {
      if (++iterations > max_iter) return QpStatus::IterationLimit;

      Eigen::VectorXd r, z;
      if (q > 0) {
        Eigen::LLT<Eigen::MatrixXd> mllt(M.topLeftCorner(q, q));
        if (mllt.info() != Eigen::Success) return QpStatus::Degenerate;
        Eigen::VectorXd u(q);
        for (int j = 0; j < q; ++j) u(j) = C.row(active[j]).dot(h);
        r = mllt.solve(u);
        z = h - X.leftCols(q) * r;
      } else {
        z = h;
      }

      const double znp = np.dot(z);
      const double sp = np.dot(w) - d(p);
      double t2 = kInf;
      // With q = n independent normals the projected direction is zero in
      // exact arithmetic; only dual (drop) steps are possible.
      if (q < n && znp > 1e-13 * (1.0 + std::abs(np.dot(h)))) t2 = -sp / znp;

      double t1 = kInf;
      int drop = -1;
      for (int j = 0; j < q; ++j)
        if (r(j) > 1e-14) {
          const double cand = lam_act[j] / r(j);
          if (cand < t1) {
            t1 = cand;
            drop = j;
          }
        }

      const double t = std::min(t1, t2);
      if (t == kInf) return QpStatus::Infeasible;

      for (int j = 0; j < q; ++j) lam_act[j] -= t * r(j);
      lam_p += t;
      if (t2 < kInf) w += t * z;

      if (t == t2) {  // constraint p joins the active set
        for (int j = 0; j < q; ++j) {
          const double m = C.row(active[j]).dot(h);
          M(j, q) = m;
          M(q, j) = m;
        }
        M(q, q) = np.dot(h);
        X.col(q) = h;
        active.push_back(p);
        lam_act.push_back(lam_p);
        ++q;
        break;
      }

      // Blocked by an active constraint: drop it and retry with the same p.
      for (int c = drop; c < q - 1; ++c) X.col(c) = X.col(c + 1);
      for (int c = drop; c < q - 1; ++c) M.col(c) = M.col(c + 1);
      for (int rr = drop; rr < q - 1; ++rr) M.row(rr) = M.row(rr + 1);
      active.erase(active.begin() + drop);
      lam_act.erase(lam_act.begin() + drop);
      --q;
    }
  }
}

}  // namespace

QpSolution solve(const QpProblem& qp, int max_iterations) {
  const int n = static_cast<int>(qp.H.rows());
  const int me = static_cast<int>(qp.Ae.rows());
  const int mi = static_cast<int>(qp.Ai.rows());
  QpSolution sol;
  sol.lambda_eq = Eigen::VectorXd::Zero(me);
  sol.lambda_in = Eigen::VectorXd::Zero(mi);

  // Normalize inequality rows so feasibility tolerances are geometric.
  std::vector<int> kept;
  std::vector<double> row_scale;
  for (int j = 0; j < mi; ++j) {
    const double s = qp.Ai.row(j).norm();
    if (s < 1e-300) {
      if (qp.bi(j) > 1e-12) {
        sol.status = QpStatus::Infeasible;
        sol.z = Eigen::VectorXd::Zero(n);
        return sol;
      }
      continue;
    }
    kept.push_back(j);
    row_scale.push_back(s);
  }
  const int mk = static_cast<int>(kept.size());
  Eigen::MatrixXd Ai(mk, n);
  Eigen::VectorXd bi(mk);
  for (int j = 0; j < mk; ++j) {
    Ai.row(j) = qp.Ai.row(kept[j]) / row_scale[j];
    bi(j) = qp.bi(kept[j]) / row_scale[j];
  }

  // Null-space reduction of the equalities via QR of Ae'.
  Eigen::MatrixXd Z;
  Eigen::VectorXd z_part;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  int rank = 0;
  if (me > 0) {
    qr.compute(qp.Ae.transpose());
    rank = static_cast<int>(qr.rank());
    const Eigen::MatrixXd Q = qr.householderQ();
    Z = Q.rightCols(n - rank);
    z_part = qr.transpose().solve(qp.be);  // particular solution of Ae z = be
    if ((qp.Ae * z_part - qp.be).cwiseAbs().maxCoeff() >
        1e-8 * (1.0 + qp.be.cwiseAbs().maxCoeff())) {
      sol.status = QpStatus::Infeasible;
      sol.z = z_part;
      return sol;
    }
  } else {
    Z = Eigen::MatrixXd::Identity(n, n);
    z_part = Eigen::VectorXd::Zero(n);
  }
  const int nr = static_cast<int>(Z.cols());

  const Eigen::MatrixXd Hr = Z.transpose() * qp.H * Z;
  const Eigen::VectorXd gr = Z.transpose() * (qp.H * z_part + qp.g);
  const Eigen::MatrixXd C = Ai * Z;
  const Eigen::VectorXd d = bi - Ai * z_part;

  if (nr == 0) {
    sol.z = z_part;
    const bool ok = (mk == 0) || (d.maxCoeff() <= 1e-8 * (1.0 + bi.cwiseAbs().maxCoeff()));
    sol.status = ok ? QpStatus::Optimal : QpStatus::Infeasible;
  } else {
    if (max_iterations <= 0) max_iterations = 50 + 5 * (mk + nr);
    Eigen::VectorXd w, lam;
    sol.status = dual_active_set(Hr, gr, C, d, max_iterations, w, lam, sol.iterations);
    sol.z = z_part + Z * w;
    if (sol.status == QpStatus::Optimal)
      for (int j = 0; j < mk; ++j) sol.lambda_in(kept[j]) = lam(j) / row_scale[j];
  }

  // Least-squares refinement of the multipliers over the active columns;
  // the active-set recursion accumulates more error than one direct solve.
  if (sol.status == QpStatus::Optimal) {
    std::vector<int> act;
    for (int j = 0; j < mi; ++j)
      if (sol.lambda_in(j) > 0.0) act.push_back(j);
    const int qa = static_cast<int>(act.size());
    if (me + qa > 0) {
      Eigen::MatrixXd N(n, me + qa);
      if (me > 0) N.leftCols(me) = qp.Ae.transpose();
      for (int k = 0; k < qa; ++k) N.col(me + k) = qp.Ai.row(act[k]).transpose();
      const Eigen::VectorXd rhs = qp.H * sol.z + qp.g;
      const Eigen::VectorXd mu = N.colPivHouseholderQr().solve(rhs);
      if (me > 0) sol.lambda_eq = mu.head(me);
      for (int k = 0; k < qa; ++k)
        sol.lambda_in(act[k]) = std::max(mu(me + k), 0.0);
    }
  }
  sol.objective = 0.5 * sol.z.dot(qp.H * sol.z) + qp.g.dot(sol.z);
  return sol;
}

}  // namespace flexcolloc::qp
