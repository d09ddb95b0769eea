#include "flexcolloc/nlp.hpp"

#include "flexcolloc/log.hpp"
#include "flexcolloc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace flexcolloc::nlp {

namespace {

bool bounded(double b) { return std::abs(b) < kUnbounded; }

Eigen::VectorXd eval_vector(const VectorCallback& c, const Eigen::VectorXd& z) {
  Eigen::VectorXd out(c.dim);
  c.value(std::span<const double>(z.data(), z.size()),
          std::span<double>(out.data(), out.size()));
  return out;
}

}  // namespace

Eigen::VectorXd gradient(const ScalarCallback& f, const Eigen::VectorXd& z) {
  const int n = static_cast<int>(z.size());
  if (f.dual) {
    const std::vector<Dual> zd = seed(z);
    return f.dual(std::span<const Dual>(zd.data(), zd.size())).gradient(n);
  }
  Eigen::VectorXd g(n), zp = z;
  for (int i = 0; i < n; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(z(i)));
    zp(i) = z(i) + h;
    const double fp = f.value(std::span<const double>(zp.data(), n));
    zp(i) = z(i) - h;
    const double fm = f.value(std::span<const double>(zp.data(), n));
    zp(i) = z(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd jacobian(const VectorCallback& c, const Eigen::VectorXd& z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd J(c.dim, n);
  if (c.dim == 0) return J;
  if (c.dual) {
    const std::vector<Dual> zd = seed(z);
    std::vector<Dual> out(c.dim);
    c.dual(std::span<const Dual>(zd.data(), zd.size()),
           std::span<Dual>(out.data(), out.size()));
    for (int i = 0; i < c.dim; ++i) J.row(i) = out[i].gradient(n).transpose();
    return J;
  }
  Eigen::VectorXd zp = z;
  for (int i = 0; i < n; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(z(i)));
    zp(i) = z(i) + h;
    const Eigen::VectorXd cp = eval_vector(c, zp);
    zp(i) = z(i) - h;
    const Eigen::VectorXd cm = eval_vector(c, zp);
    zp(i) = z(i);
    J.col(i) = (cp - cm) / (2.0 * h);
  }
  return J;
}

namespace {

struct Scaled {
  double sf = 1.0;
  Eigen::VectorXd se;  // per equality row
  Eigen::VectorXd si;  // per inequality row
};

struct Point {
  double f = 0.0;       // scaled objective
  Eigen::VectorXd ce;   // scaled equality values
  Eigen::VectorXd ci;   // scaled inequality values
};

struct Derivs {
  Eigen::VectorXd grad;
  Eigen::MatrixXd Je;
  Eigen::MatrixXd Ji;
};

/// Row bookkeeping for mapping QP multipliers back to problem structures.
/// kind: 0 = inequality row, 1 = variable bound. sign +1 lower, -1 upper.
struct RowRef {
  int kind;
  int index;
  int sign;
};

class Sqp {
 public:
  Sqp(const NlpProblem& p, const SolverOptions& opt) : p_(p), opt_(opt) {
    n_ = p.n;
    me_ = p.equalities.dim;
    mi_ = p.inequalities.dim;
    has_box_ = p.zl.size() == n_ && p.zu.size() == n_;

    z_ = p.z0;
    if (z_.size() != n_) throw std::invalid_argument("solve: z0 has wrong dimension");
    if (!z_.allFinite()) throw std::invalid_argument("solve: z0 not finite");

    init_scaling();
    classify_rows();
  }

  NlpSolution run();

 private:
  void init_scaling() {
    const double f0 = p_.objective.value(view(z_));
    if (!std::isfinite(f0)) throw std::runtime_error("solve: objective not finite at z0");
    scale_.sf = std::max(1.0, std::abs(f0));
    if (me_ > 0) {
      const Eigen::VectorXd ce0 = eval_vector(p_.equalities, z_);
      if (!ce0.allFinite()) throw std::runtime_error("solve: equalities not finite at z0");
      scale_.se = ce0.cwiseAbs().cwiseMax(1.0);
    }
    if (mi_ > 0) {
      const Eigen::VectorXd ci0 = eval_vector(p_.inequalities, z_);
      if (!ci0.allFinite()) throw std::runtime_error("solve: inequalities not finite at z0");
      scale_.si = ci0.cwiseAbs().cwiseMax(1.0);
    }
  }

  // Inequality rows with equal bounds and pinned variables become equalities
  // in the QP so the active-set solver never sees a degenerate pair.
  void classify_rows() {
    il_s_.resize(mi_);
    iu_s_.resize(mi_);
    ineq_is_eq_.assign(mi_, false);
    for (int i = 0; i < mi_; ++i) {
      il_s_(i) = bounded(p_.il(i)) ? p_.il(i) / scale_.si(i) : -kUnbounded;
      iu_s_(i) = bounded(p_.iu(i)) ? p_.iu(i) / scale_.si(i) : kUnbounded;
      if (bounded(p_.il(i)) && bounded(p_.iu(i)) &&
          iu_s_(i) - il_s_(i) <= 1e-12 * std::max(1.0, std::abs(il_s_(i))))
        ineq_is_eq_[i] = true;
    }
    var_is_fixed_.assign(n_, false);
    if (has_box_)
      for (int k = 0; k < n_; ++k)
        if (bounded(p_.zl(k)) && bounded(p_.zu(k)) &&
            p_.zu(k) - p_.zl(k) <= 1e-12 * std::max(1.0, std::abs(p_.zl(k))))
          var_is_fixed_[k] = true;
  }

  static std::span<const double> view(const Eigen::VectorXd& z) {
    return {z.data(), static_cast<size_t>(z.size())};
  }

  Point eval_point(const Eigen::VectorXd& z) const {
    Point pt;
    pt.f = p_.objective.value(view(z)) / scale_.sf;
    if (me_ > 0) pt.ce = eval_vector(p_.equalities, z).cwiseQuotient(scale_.se);
    if (mi_ > 0) pt.ci = eval_vector(p_.inequalities, z).cwiseQuotient(scale_.si);
    return pt;
  }

  Derivs eval_derivs(const Eigen::VectorXd& z) const {
    Derivs d;
    d.grad = gradient(p_.objective, z) / scale_.sf;
    d.Je = jacobian(p_.equalities, z);
    for (int i = 0; i < me_; ++i) d.Je.row(i) /= scale_.se(i);
    d.Ji = jacobian(p_.inequalities, z);
    for (int i = 0; i < mi_; ++i) d.Ji.row(i) /= scale_.si(i);
    return d;
  }

  double viol_inf(const Point& pt, const Eigen::VectorXd& z) const {
    double v = 0.0;
    for (int i = 0; i < me_; ++i) v = std::max(v, std::abs(pt.ce(i)));
    for (int i = 0; i < mi_; ++i) {
      v = std::max(v, il_s_(i) - pt.ci(i));
      v = std::max(v, pt.ci(i) - iu_s_(i));
    }
    if (has_box_)
      for (int k = 0; k < n_; ++k) {
        if (bounded(p_.zl(k))) v = std::max(v, p_.zl(k) - z(k));
        if (bounded(p_.zu(k))) v = std::max(v, z(k) - p_.zu(k));
      }
    return v;
  }

  double viol_l1(const Point& pt, const Eigen::VectorXd& z) const {
    double v = 0.0;
    for (int i = 0; i < me_; ++i) v += std::abs(pt.ce(i));
    for (int i = 0; i < mi_; ++i) {
      v += std::max(0.0, il_s_(i) - pt.ci(i));
      v += std::max(0.0, pt.ci(i) - iu_s_(i));
    }
    if (has_box_)
      for (int k = 0; k < n_; ++k) {
        if (bounded(p_.zl(k))) v += std::max(0.0, p_.zl(k) - z(k));
        if (bounded(p_.zu(k))) v += std::max(0.0, z(k) - p_.zu(k));
      }
    return v;
  }

  /// Builds the local QP around (z, pt, der). Also fills eq_refs_/ineq_refs_.
  qp::QpProblem build_qp(const Point& pt, const Derivs& der,
                         const Eigen::MatrixXd& B) {
    eq_refs_.clear();
    ineq_refs_.clear();

    int ne = me_;
    for (int i = 0; i < mi_; ++i)
      if (ineq_is_eq_[i]) ++ne;
    for (int k = 0; k < n_; ++k)
      if (var_is_fixed_[k]) ++ne;

    int ni = 0;
    for (int i = 0; i < mi_; ++i)
      if (!ineq_is_eq_[i]) {
        if (bounded(il_s_(i))) ++ni;
        if (bounded(iu_s_(i))) ++ni;
      }
    if (has_box_)
      for (int k = 0; k < n_; ++k)
        if (!var_is_fixed_[k]) {
          if (bounded(p_.zl(k))) ++ni;
          if (bounded(p_.zu(k))) ++ni;
        }

    qp::QpProblem q;
    q.H = B;
    q.g = der.grad;
    q.Ae.resize(ne, n_);
    q.be.resize(ne);
    q.Ai.resize(ni, n_);
    q.bi.resize(ni);

    int r = 0;
    for (int i = 0; i < me_; ++i, ++r) {
      q.Ae.row(r) = der.Je.row(i);
      q.be(r) = -pt.ce(i);
    }
    for (int i = 0; i < mi_; ++i)
      if (ineq_is_eq_[i]) {
        q.Ae.row(r) = der.Ji.row(i);
        q.be(r) = il_s_(i) - pt.ci(i);
        eq_refs_.push_back({0, i, +1});
        ++r;
      }
    for (int k = 0; k < n_; ++k)
      if (var_is_fixed_[k]) {
        q.Ae.row(r).setZero();
        q.Ae(r, k) = 1.0;
        q.be(r) = p_.zl(k) - z_(k);
        eq_refs_.push_back({1, k, +1});
        ++r;
      }

    r = 0;
    for (int i = 0; i < mi_; ++i)
      if (!ineq_is_eq_[i]) {
        if (bounded(il_s_(i))) {
          q.Ai.row(r) = der.Ji.row(i);
          q.bi(r) = il_s_(i) - pt.ci(i);
          ineq_refs_.push_back({0, i, +1});
          ++r;
        }
        if (bounded(iu_s_(i))) {
          q.Ai.row(r) = -der.Ji.row(i);
          q.bi(r) = pt.ci(i) - iu_s_(i);
          ineq_refs_.push_back({0, i, -1});
          ++r;
        }
      }
    if (has_box_)
      for (int k = 0; k < n_; ++k)
        if (!var_is_fixed_[k]) {
          if (bounded(p_.zl(k))) {
            q.Ai.row(r).setZero();
            q.Ai(r, k) = 1.0;
            q.bi(r) = p_.zl(k) - z_(k);
            ineq_refs_.push_back({1, k, +1});
            ++r;
          }
          if (bounded(p_.zu(k))) {
            q.Ai.row(r).setZero();
            q.Ai(r, k) = -1.0;
            q.bi(r) = z_(k) - p_.zu(k);
            ineq_refs_.push_back({1, k, -1});
            ++r;
          }
        }
    return q;
  }

  /// Slack-relaxed copy of q: equalities get a signed slack pair, each
  /// inequality a one-sided slack, all penalized linearly at weight rho.
  qp::QpProblem elastic_qp(const qp::QpProblem& q, double rho) const {
    const int ne = static_cast<int>(q.Ae.rows());
    const int ni = static_cast<int>(q.Ai.rows());
    const int ns = 2 * ne + ni;
    const int nv = n_ + ns;

    qp::QpProblem e;
    e.H = Eigen::MatrixXd::Zero(nv, nv);
    e.H.topLeftCorner(n_, n_) = q.H;
    e.H.bottomRightCorner(ns, ns) = 1e-8 * std::max(1.0, rho) *
                                    Eigen::MatrixXd::Identity(ns, ns);
    e.g = Eigen::VectorXd::Constant(nv, rho);
    e.g.head(n_) = q.g;

    e.Ae = Eigen::MatrixXd::Zero(ne, nv);
    e.Ae.leftCols(n_) = q.Ae;
    for (int i = 0; i < ne; ++i) {
      e.Ae(i, n_ + 2 * i) = 1.0;
      e.Ae(i, n_ + 2 * i + 1) = -1.0;
    }
    e.be = q.be;

    e.Ai = Eigen::MatrixXd::Zero(ni + ns, nv);
    e.Ai.topLeftCorner(ni, n_) = q.Ai;
    for (int i = 0; i < ni; ++i) e.Ai(i, n_ + 2 * ne + i) = 1.0;
    e.Ai.bottomRightCorner(ns, ns).setIdentity();
    e.bi = Eigen::VectorXd::Zero(ni + ns);
    e.bi.head(ni) = q.bi;
    return e;
  }

  /// Diagonal second-difference probe of the scaled objective. BFGS starting
  /// from the right per-variable curvature scale converges far faster than
  /// from the identity on quadrature-weighted objectives.
  Eigen::MatrixXd initial_hessian() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
    Eigen::VectorXd zp = z_;
    const double f0 = p_.objective.value(view(zp));
    for (int i = 0; i < n_; ++i) {
      const double h = 1e-4 * std::max(1.0, std::abs(z_(i)));
      zp(i) = z_(i) + h;
      const double fp = p_.objective.value(view(zp));
      zp(i) = z_(i) - h;
      const double fm = p_.objective.value(view(zp));
      zp(i) = z_(i);
      const double dd = (fp - 2.0 * f0 + fm) / (h * h * scale_.sf);
      if (std::isfinite(dd)) d(i) = dd;
    }
    const double dmax = d.maxCoeff();
    const double floor = std::max(1e-6 * std::max(1.0, dmax), 1e-6);
    return d.cwiseMax(floor).asDiagonal();
  }

  const NlpProblem& p_;
  const SolverOptions& opt_;
  int n_ = 0, me_ = 0, mi_ = 0;
  bool has_box_ = false;
  Eigen::VectorXd z_;
  Scaled scale_;
  Eigen::VectorXd il_s_, iu_s_;
  std::vector<bool> ineq_is_eq_;
  std::vector<bool> var_is_fixed_;
  std::vector<RowRef> eq_refs_;
  std::vector<RowRef> ineq_refs_;
};

NlpSolution Sqp::run() {
  NlpSolution sol;
  const Eigen::MatrixXd B0 = initial_hessian();
  Eigen::MatrixXd B = B0;
  double mu = 1.0;
  int stalled = 0;

  Point pt = eval_point(z_);
  Derivs der = eval_derivs(z_);

  Eigen::VectorXd lam_e = Eigen::VectorXd::Zero(me_);
  Eigen::VectorXd lam_i = Eigen::VectorXd::Zero(mi_);
  Eigen::VectorXd lam_b = Eigen::VectorXd::Zero(n_);
  Eigen::VectorXd prev_z;
  Derivs prev_der;
  double best_kkt = HUGE_VAL;
  Eigen::VectorXd best_z, best_lam_e, best_lam_i, best_lam_b;
  int kkt_stall = 0;
  double prev_kkt = -1.0;
  int frozen = 0;
  double radius = 1e6;  // cap on the step's max-norm, adapted from line-search behavior

  for (int iter = 0; iter < opt_.max_iter; ++iter) {
    sol.iterations = iter + 1;

    qp::QpProblem q = build_qp(pt, der, B);
    qp::QpSolution qs = qp::solve(q);
    bool elastic = false;
    if (qs.status == qp::QpStatus::Infeasible) {
      elastic = true;
      qs = qp::solve(elastic_qp(q, 100.0 * std::max(1.0, mu)));
    }
    if (qs.status != qp::QpStatus::Optimal) {
      logging::info("sqp: subproblem failed, status " +
                std::to_string(static_cast<int>(qs.status)));
      break;
    }
    const Eigen::VectorXd dz = qs.z.head(n_);

    // Scatter QP multipliers back onto problem rows.
    lam_e = qs.lambda_eq.head(me_);
    lam_i.setZero();
    lam_b.setZero();
    for (size_t j = 0; j < eq_refs_.size(); ++j) {
      const RowRef& ref = eq_refs_[j];
      const double lam = qs.lambda_eq(me_ + static_cast<int>(j));
      (ref.kind == 0 ? lam_i(ref.index) : lam_b(ref.index)) = lam;
    }
    for (size_t j = 0; j < ineq_refs_.size(); ++j) {
      const RowRef& ref = ineq_refs_[j];
      const double lam = ref.sign * qs.lambda_in(static_cast<int>(j));
      (ref.kind == 0 ? lam_i(ref.index) : lam_b(ref.index)) += lam;
    }

    // KKT residual at the current point with the fresh multipliers.
    Eigen::VectorXd station = der.grad - lam_b;
    if (me_ > 0) station -= der.Je.transpose() * lam_e;
    if (mi_ > 0) station -= der.Ji.transpose() * lam_i;
    const double feas = viol_inf(pt, z_);
    double comp = 0.0;
    for (size_t j = 0; j < ineq_refs_.size(); ++j) {
      const RowRef& ref = ineq_refs_[j];
      double slack;
      if (ref.kind == 0)
        slack = ref.sign > 0 ? pt.ci(ref.index) - il_s_(ref.index)
                             : iu_s_(ref.index) - pt.ci(ref.index);
      else
        slack = ref.sign > 0 ? z_(ref.index) - p_.zl(ref.index)
                             : p_.zu(ref.index) - z_(ref.index);
      comp = std::max(comp, std::abs(qs.lambda_in(static_cast<int>(j)) * slack));
    }
    sol.kkt_residual = std::max({station.cwiseAbs().maxCoeff(), feas, comp});
    // Near a feasible solution the merit function saturates in round-off;
    // ride the Newton contraction on the KKT residual instead, stopping
    // once it no longer shrinks.
    const bool endgame =
        feas <= 10.0 * opt_.tol && sol.kkt_residual <= 1e4 * opt_.tol;
    if (endgame && sol.kkt_residual > 0.999 * best_kkt) {
      if (++kkt_stall >= 12) break;
    } else {
      kkt_stall = 0;
    }
    if (sol.kkt_residual < best_kkt) {
      best_kkt = sol.kkt_residual;
      best_z = z_;
      best_lam_e = lam_e;
      best_lam_i = lam_i;
      best_lam_b = lam_b;
    }
    if (logging::enabled(logging::Level::Debug)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "sqp iter %3d f %.6e viol %.2e kkt %.2e |dz| %.2e mu %.1e%s",
                    iter, pt.f * scale_.sf, feas, sol.kkt_residual,
                    dz.cwiseAbs().maxCoeff(), mu, elastic ? " elastic" : "");
      logging::debug(buf);
    }
    if (sol.kkt_residual <= opt_.tol) {
      sol.status = SolveStatus::Converged;
      break;
    }

    // Damped BFGS update: Lagrangian gradient change between the previous
    // and current point, both taken at the current multipliers.
    if (prev_z.size() > 0) {
      const Eigen::VectorXd s = z_ - prev_z;
      Eigen::VectorXd y = der.grad - prev_der.grad;
      if (me_ > 0) y -= (der.Je - prev_der.Je).transpose() * lam_e;
      if (mi_ > 0) y -= (der.Ji - prev_der.Ji).transpose() * lam_i;
      const Eigen::VectorXd Bs = B * s;
      const double sBs = s.dot(Bs);
      const double sy = s.dot(y);
      if (sBs > 1e-16 && s.cwiseAbs().maxCoeff() > 1e-14 * (1.0 + z_.cwiseAbs().maxCoeff())) {
        Eigen::VectorXd r = y;
        if (sy < 0.2 * sBs) {
          const double theta = 0.8 * sBs / (sBs - sy);
          r = theta * y + (1.0 - theta) * Bs;
        }
        const double sr = s.dot(r);
        if (sr > 1e-16) {
          B += r * r.transpose() / sr - Bs * Bs.transpose() / sBs;
          B = 0.5 * (B + B.transpose()).eval();
        }
      }
    }
    prev_z = z_;
    prev_der = der;

    const double lam_max = std::max(
        {me_ > 0 ? lam_e.cwiseAbs().maxCoeff() : 0.0,
         mi_ > 0 ? lam_i.cwiseAbs().maxCoeff() : 0.0,
         n_ > 0 ? lam_b.cwiseAbs().maxCoeff() : 0.0});
    mu = std::max(mu, 1.1 * lam_max + 1e-3);

    const double v1 = viol_l1(pt, z_);
    const double phi0 = pt.f + mu * v1;

    const double step_norm = dz.cwiseAbs().maxCoeff();
    if (step_norm <= 1e-12 * (1.0 + z_.cwiseAbs().maxCoeff())) {
      if (++stalled >= 2) {
        sol.status = feas > 100.0 * opt_.tol ? SolveStatus::Infeasible
                                             : SolveStatus::MaxIter;
        break;
      }
      B = B0;
      continue;
    }

    // When recent line searches accepted only a tiny fraction of the
    // proposal the quadratic model is unreliable at the full step length;
    // cap the direction instead of re-halving from 1 every iteration. The
    // endgame contraction needs the full step.
    Eigen::VectorXd dir = dz;
    if (!endgame && step_norm > radius) dir *= radius / step_norm;
    const double dir_len = endgame ? step_norm : std::min(step_norm, radius);
    const double descent = der.grad.dot(dir) - mu * v1;

    double alpha = 1.0;
    bool accepted = false;
    Point trial;
    Eigen::VectorXd zt;
    for (int ls = 0; ls < 40; ++ls) {
      zt = z_ + alpha * dir;
      trial = eval_point(zt);
      const bool finite = std::isfinite(trial.f) &&
                          (me_ == 0 || trial.ce.allFinite()) &&
                          (mi_ == 0 || trial.ci.allFinite());
      if (finite) {
        const double phit = trial.f + mu * viol_l1(trial, zt);
        if (endgame || phit <= phi0 + 1e-4 * alpha * descent) {
          sol.merit_history.push_back({phi0, phit});
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (v1 > opt_.tol) {
        mu *= 10.0;
        if (mu > 1e10) break;
      } else {
        radius = std::max(0.1 * dir_len, 1e-8);
        B = B0;
        if (++stalled >= 3) break;
      }
      continue;
    }
    stalled = 0;
    if (alpha >= 0.999)
      radius = std::min(radius * 2.0, 1e6);
    else if (alpha < 0.1)
      radius = std::max(2.0 * alpha * dir_len, 1e-8);
    // Accepted steps that leave the KKT residual bit-identical mean the
    // iterate is pinned at a fixed point of the line search; further
    // iterations cannot move it.
    if (std::abs(sol.kkt_residual - prev_kkt) <=
        1e-12 * (1e-300 + sol.kkt_residual)) {
      if (++frozen >= 10) break;
    } else {
      frozen = 0;
    }
    prev_kkt = sol.kkt_residual;
    z_ = zt;
    pt = trial;
    der = eval_derivs(z_);
  }

  if (best_z.size() > 0 && best_kkt < sol.kkt_residual) {
    z_ = best_z;
    pt = eval_point(z_);
    lam_e = best_lam_e;
    lam_i = best_lam_i;
    lam_b = best_lam_b;
    sol.kkt_residual = best_kkt;
  }

  sol.z = z_;
  sol.objective = pt.f * scale_.sf;
  sol.constraint_violation = 0.0;
  {
    Point raw;
    raw.f = pt.f;
    if (me_ > 0) raw.ce = pt.ce.cwiseProduct(scale_.se);
    if (mi_ > 0) raw.ci = pt.ci.cwiseProduct(scale_.si);
    for (int i = 0; i < me_; ++i)
      sol.constraint_violation = std::max(sol.constraint_violation, std::abs(raw.ce(i)));
    for (int i = 0; i < mi_; ++i) {
      if (bounded(p_.il(i)))
        sol.constraint_violation = std::max(sol.constraint_violation, p_.il(i) - raw.ci(i));
      if (bounded(p_.iu(i)))
        sol.constraint_violation = std::max(sol.constraint_violation, raw.ci(i) - p_.iu(i));
    }
    if (has_box_)
      for (int k = 0; k < n_; ++k) {
        if (bounded(p_.zl(k)))
          sol.constraint_violation = std::max(sol.constraint_violation, p_.zl(k) - z_(k));
        if (bounded(p_.zu(k)))
          sol.constraint_violation = std::max(sol.constraint_violation, z_(k) - p_.zu(k));
      }
  }

  // Multipliers for the user's unscaled functions.
  sol.lambda_eq.resize(me_);
  for (int i = 0; i < me_; ++i) sol.lambda_eq(i) = lam_e(i) * scale_.sf / scale_.se(i);
  sol.lambda_ineq.resize(mi_);
  for (int i = 0; i < mi_; ++i) sol.lambda_ineq(i) = lam_i(i) * scale_.sf / scale_.si(i);
  sol.lambda_bounds = lam_b * scale_.sf;
  return sol;
}

}  // namespace

NlpSolution solve(const NlpProblem& p, const SolverOptions& options) {
  Sqp sqp(p, options);
  return sqp.run();
}

}  // namespace flexcolloc::nlp
