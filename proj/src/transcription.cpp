#include "flexcolloc/transcription.hpp"

#include "flexcolloc/bernstein.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace flexcolloc::transcription {

double gamma(double tau, double dt_prev, double dt_cur) {
  if (!(dt_cur > dt_prev)) throw std::invalid_argument("gamma: degenerate interval");
  return 0.5 * (dt_cur - dt_prev) * tau + 0.5 * (dt_prev + dt_cur);
}

FlexibleMesh FlexibleMesh::uniform(double t0, double tf, int n_h, double phi) {
  if (!(tf > t0)) throw std::invalid_argument("uniform mesh: tf must exceed t0");
  if (n_h < 1) throw std::invalid_argument("uniform mesh: n_h must be positive");
  if (phi < 0.0 || phi >= 1.0)
    throw std::invalid_argument("uniform mesh: phi must lie in [0, 1)");
  FlexibleMesh mesh;
  mesh.t0 = t0;
  mesh.tf = tf;
  mesh.nominal.resize(n_h + 1);
  for (int i = 0; i <= n_h; ++i)
    mesh.nominal[i] = t0 + (tf - t0) * static_cast<double>(i) / n_h;
  mesh.nominal[n_h] = tf;
  mesh.phi.assign(n_h, phi);
  return mesh;
}

Eigen::MatrixXd bernstein_transfer_matrix(const quadrature::InterpolationGrid& grid) {
  const int m = grid.size();
  const int np = m - 1;
  Eigen::MatrixXd V(m, m);
  for (int j = 0; j < m; ++j) {
    const double s = 0.5 * grid.points[j] + 0.5;
    double p = 1.0;
    for (int k = 0; k < m; ++k) {
      V(j, k) = p;
      p *= s;
    }
  }
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j <= np; ++j)
    for (int k = 0; k <= j; ++k)
      B(j, k) = bernstein::binomial(j, k) / bernstein::binomial(np, k);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(V.transpose());
  const Eigen::MatrixXd C = lu.solve(B.transpose()).transpose();
  if ((C * V - B).cwiseAbs().maxCoeff() > 1e-7)
    throw std::runtime_error("bernstein_transfer_matrix: interpolation matrix singular");
  return C;
}

namespace {

using nlp::kUnbounded;

bool bounded(double b) { return std::abs(b) < kUnbounded; }

Eigen::VectorXd normalize_box(const Eigen::VectorXd& box, int dim, double fill) {
  if (box.size() == dim) return box;
  if (box.size() == 0) return Eigen::VectorXd::Constant(dim, fill);
  throw std::invalid_argument("assemble: box dimension mismatch");
}

/// Immutable data captured by the assembled NLP callbacks.
struct Context {
  DopDefinition dop;
  DecisionLayout layout;
  quadrature::InterpolationGrid sgrid;  // n+1 state points (LGR nodes plus +1)
  quadrature::InterpolationGrid ugrid;  // n LGR points
  std::vector<double> wq;               // n LGR quadrature weights
  Eigen::MatrixXd Cs, Cu;               // Bernstein transfer matrices
  Eigen::VectorXd xl, xu, ul, uu;       // boxes normalized to full size
  std::vector<int> state_boxed;         // components with a finite state bound
  std::vector<int> input_boxed;
  int num_eq = 0;
  int num_ineq = 0;
};

double call_cost(const BoundaryCost& f, std::span<const double> a,
                 std::span<const double> b) {
  return f.value(a, b);
}
Dual call_cost(const BoundaryCost& f, std::span<const Dual> a,
               std::span<const Dual> b) {
  return f.dual(a, b);
}
double call_cost(const RunningCost& f, std::span<const double> x,
                 std::span<const double> u, const double& t) {
  return f.value(x, u, t);
}
Dual call_cost(const RunningCost& f, std::span<const Dual> x,
               std::span<const Dual> u, const Dual& t) {
  return f.dual(x, u, t);
}
void call_fn(const BoundaryCondition& f, std::span<const double> a,
             std::span<const double> b, std::span<double> out) {
  f.value(a, b, out);
}
void call_fn(const BoundaryCondition& f, std::span<const Dual> a,
             std::span<const Dual> b, std::span<Dual> out) {
  f.dual(a, b, out);
}
void call_fn(const DynamicsResidual& f, std::span<const double> xd,
             std::span<const double> x, std::span<const double> u, const double& t,
             std::span<double> out) {
  f.value(xd, x, u, t, out);
}
void call_fn(const DynamicsResidual& f, std::span<const Dual> xd,
             std::span<const Dual> x, std::span<const Dual> u, const Dual& t,
             std::span<Dual> out) {
  f.dual(xd, x, u, t, out);
}

template <class T>
std::vector<T> resolve_breakpoints(const Context& c, std::span<const T> z) {
  const DecisionLayout& lay = c.layout;
  std::vector<T> bp(lay.n_h + 1);
  bp.front() = T(c.dop.t0);
  bp.back() = T(c.dop.tf);
  for (int i = 1; i < lay.n_h; ++i)
    bp[i] = lay.num_mesh > 0 ? z[lay.mesh_index(i)] : T(lay.mesh.nominal[i]);
  return bp;
}

template <class T>
std::span<const T> state_at(const Context& c, std::span<const T> z, int i, int j) {
  return z.subspan(c.layout.state_index(i, j, 0), c.layout.n_x);
}

template <class T>
std::span<const T> input_at(const Context& c, std::span<const T> z, int i, int j) {
  return z.subspan(c.layout.input_index(i, j, 0), c.layout.n_u);
}

template <class T>
T objective_impl(const Context& c, std::span<const T> z) {
  const DecisionLayout& lay = c.layout;
  T total(0.0);
  if (c.dop.m.value)
    total += call_cost(c.dop.m, state_at(c, z, 0, 0), state_at(c, z, lay.n_h - 1, lay.n));
  if (c.dop.l.value) {
    const std::vector<T> bp = resolve_breakpoints(c, z);
    for (int i = 0; i < lay.n_h; ++i) {
      const T half = 0.5 * (bp[i + 1] - bp[i]);
      const T mid = 0.5 * (bp[i] + bp[i + 1]);
      for (int j = 0; j < lay.n; ++j) {
        const T t = half * c.sgrid.points[j] + mid;
        total += half * c.wq[j] *
                 call_cost(c.dop.l, state_at(c, z, i, j), input_at(c, z, i, j), t);
      }
    }
  }
  return total;
}

template <class T>
void equalities_impl(const Context& c, std::span<const T> z, std::span<T> out) {
  const DecisionLayout& lay = c.layout;
  int row = 0;
  if (c.dop.b.dim > 0) {
    call_fn(c.dop.b, state_at(c, z, 0, 0), state_at(c, z, lay.n_h - 1, lay.n),
            out.subspan(0, c.dop.b.dim));
    row += c.dop.b.dim;
  }
  const std::vector<T> bp = resolve_breakpoints(c, z);
  const int n_r = c.dop.r.dim;
  std::vector<T> xdot(lay.n_x);
  for (int i = 0; i < lay.n_h; ++i) {
    const T h = bp[i + 1] - bp[i];
    const T scale = 2.0 / h;
    const T mid = 0.5 * (bp[i] + bp[i + 1]);
    for (int j = 0; j < lay.n; ++j) {
      for (int k = 0; k < lay.n_x; ++k) {
        T acc(0.0);
        for (int l = 0; l <= lay.n; ++l)
          acc += c.sgrid.diff(j, l) * z[lay.state_index(i, l, k)];
        xdot[k] = scale * acc;
      }
      const T t = (0.5 * c.sgrid.points[j]) * h + mid;
      call_fn(c.dop.r, std::span<const T>(xdot.data(), xdot.size()),
              state_at(c, z, i, j), input_at(c, z, i, j), t,
              out.subspan(row, n_r));
      row += n_r;
    }
  }
}

template <class T>
void inequalities_impl(const Context& c, std::span<const T> z, std::span<T> out) {
  const DecisionLayout& lay = c.layout;
  int row = 0;
  for (int i = 0; i < lay.n_h; ++i) {
    for (int k : c.state_boxed)
      for (int m = 0; m <= lay.n; ++m) {
        T acc(0.0);
        for (int l = 0; l <= lay.n; ++l)
          acc += c.Cs(m, l) * z[lay.state_index(i, l, k)];
        out[row++] = acc;
      }
    for (int k : c.input_boxed)
      for (int m = 0; m < lay.n; ++m) {
        T acc(0.0);
        for (int l = 0; l < lay.n; ++l)
          acc += c.Cu(m, l) * z[lay.input_index(i, l, k)];
        out[row++] = acc;
      }
  }
  if (lay.num_mesh > 0) {
    const std::vector<T> bp = resolve_breakpoints(c, z);
    for (int i = 0; i < lay.n_h; ++i) out[row++] = bp[i + 1] - bp[i];
  }
}

Eigen::VectorXd initial_guess(const Context& c) {
  const DecisionLayout& lay = c.layout;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(lay.total());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(lay.n_x);
  Eigen::VectorXd bvec = Eigen::VectorXd::Zero(lay.n_x);
  for (int k = 0; k < lay.n_x; ++k) {
    const double h0 = c.dop.x0_hint.size() > 0 ? c.dop.x0_hint(k) : std::nan("");
    const double hf = c.dop.xf_hint.size() > 0 ? c.dop.xf_hint(k) : std::nan("");
    if (!std::isnan(h0) && !std::isnan(hf)) {
      a(k) = h0;
      bvec(k) = (hf - h0) / (c.dop.tf - c.dop.t0);
    } else if (!std::isnan(h0)) {
      a(k) = h0;
    } else if (!std::isnan(hf)) {
      a(k) = hf;
    }
  }
  for (int i = 0; i < lay.n_h; ++i)
    for (int j = 0; j <= lay.n; ++j) {
      const double t = gamma(c.sgrid.points[j], lay.mesh.nominal[i],
                             lay.mesh.nominal[i + 1]);
      for (int k = 0; k < lay.n_x; ++k)
        z(lay.state_index(i, j, k)) = a(k) + bvec(k) * (t - c.dop.t0);
    }
  for (int i = 1; i < lay.n_h; ++i)
    if (lay.num_mesh > 0) z(lay.mesh_index(i)) = lay.mesh.nominal[i];
  return z;
}

}  // namespace

TranscribedProblem assemble(const DopDefinition& dop, int n, const FlexibleMesh& mesh,
                            ConstraintMode mode) {
  if (n < 1) throw std::invalid_argument("assemble: degree must be at least 1");
  if (!dop.r.value) throw std::invalid_argument("assemble: dynamics callback missing");
  const int n_h = mesh.intervals();
  if (n_h < 1 || mesh.nominal.size() != static_cast<size_t>(n_h) + 1)
    throw std::invalid_argument("assemble: mesh breakpoint count mismatch");
  const double span = dop.tf - dop.t0;
  if (!(span > 0.0)) throw std::invalid_argument("assemble: degenerate horizon");
  if (std::abs(mesh.nominal.front() - dop.t0) > 1e-9 * span ||
      std::abs(mesh.nominal.back() - dop.tf) > 1e-9 * span)
    throw std::invalid_argument("assemble: mesh endpoints disagree with horizon");
  for (int i = 0; i < n_h; ++i) {
    if (!(mesh.nominal[i + 1] > mesh.nominal[i]))
      throw std::invalid_argument("assemble: nominal breakpoints not increasing");
    if (mesh.phi[i] < 0.0 || mesh.phi[i] >= 1.0)
      throw std::invalid_argument("assemble: phi outside [0, 1)");
  }

  if ((dop.x0_hint.size() != 0 && dop.x0_hint.size() != dop.n_x) ||
      (dop.xf_hint.size() != 0 && dop.xf_hint.size() != dop.n_x))
    throw std::invalid_argument("assemble: boundary hint dimension mismatch");

  auto ctx = std::make_shared<Context>();
  Context& c = *ctx;
  c.dop = dop;
  c.xl = normalize_box(dop.x_lower, dop.n_x, -kUnbounded);
  c.xu = normalize_box(dop.x_upper, dop.n_x, kUnbounded);
  c.ul = normalize_box(dop.u_lower, dop.n_u, -kUnbounded);
  c.uu = normalize_box(dop.u_upper, dop.n_u, kUnbounded);

  DecisionLayout& lay = c.layout;
  lay.n = n;
  lay.n_h = n_h;
  lay.n_x = dop.n_x;
  lay.n_u = dop.n_u;
  lay.mode = mode;
  lay.mesh = mesh;
  lay.mesh.t0 = dop.t0;
  lay.mesh.tf = dop.tf;
  lay.mesh.nominal.front() = dop.t0;
  lay.mesh.nominal.back() = dop.tf;
  if (mode == ConstraintMode::BernsteinFixed)
    lay.mesh.phi.assign(n_h, 0.0);
  lay.num_states = (n_h * n + 1) * dop.n_x;
  lay.num_inputs = n_h * n * dop.n_u;
  lay.num_mesh = mode == ConstraintMode::BernsteinFlexible ? n_h - 1 : 0;

  c.sgrid = quadrature::state_grid(n);
  c.ugrid = quadrature::input_grid(n);
  c.wq = quadrature::lgr_nodes(n).weights;
  if (mode != ConstraintMode::SamplePoints) {
    c.Cs = bernstein_transfer_matrix(c.sgrid);
    c.Cu = bernstein_transfer_matrix(c.ugrid);
    for (int k = 0; k < dop.n_x; ++k)
      if (bounded(c.xl(k)) || bounded(c.xu(k))) c.state_boxed.push_back(k);
    for (int k = 0; k < dop.n_u; ++k)
      if (bounded(c.ul(k)) || bounded(c.uu(k))) c.input_boxed.push_back(k);
  }

  c.num_eq = dop.b.dim + n_h * n * dop.r.dim;
  const int rows_per_interval =
      static_cast<int>(c.state_boxed.size()) * (n + 1) +
      static_cast<int>(c.input_boxed.size()) * n;
  c.num_ineq = n_h * rows_per_interval + (lay.num_mesh > 0 ? n_h : 0);

  TranscribedProblem tp;
  tp.layout = lay;
  nlp::NlpProblem& np = tp.nlp;
  np.n = lay.total();

  const bool dual_obj = (!dop.m.value || dop.m.dual) && (!dop.l.value || dop.l.dual);
  const bool dual_eq = (dop.b.dim == 0 || dop.b.dual) && bool(dop.r.dual);

  np.objective.value = [ctx](std::span<const double> z) {
    return objective_impl<double>(*ctx, z);
  };
  if (dual_obj)
    np.objective.dual = [ctx](std::span<const Dual> z) {
      return objective_impl<Dual>(*ctx, z);
    };

  np.equalities.dim = c.num_eq;
  np.equalities.value = [ctx](std::span<const double> z, std::span<double> out) {
    equalities_impl<double>(*ctx, z, out);
  };
  if (dual_eq)
    np.equalities.dual = [ctx](std::span<const Dual> z, std::span<Dual> out) {
      equalities_impl<Dual>(*ctx, z, out);
    };

  np.inequalities.dim = c.num_ineq;
  if (c.num_ineq > 0) {
    np.inequalities.value = [ctx](std::span<const double> z, std::span<double> out) {
      inequalities_impl<double>(*ctx, z, out);
    };
    np.inequalities.dual = [ctx](std::span<const Dual> z, std::span<Dual> out) {
      inequalities_impl<Dual>(*ctx, z, out);
    };
    np.il.resize(c.num_ineq);
    np.iu.resize(c.num_ineq);
    int row = 0;
    for (int i = 0; i < n_h; ++i) {
      for (int k : c.state_boxed)
        for (int m = 0; m <= n; ++m, ++row) {
          np.il(row) = c.xl(k);
          np.iu(row) = c.xu(k);
        }
      for (int k : c.input_boxed)
        for (int m = 0; m < n; ++m, ++row) {
          np.il(row) = c.ul(k);
          np.iu(row) = c.uu(k);
        }
    }
    if (lay.num_mesh > 0) {
      const double floor_len = 1e-3 * span;
      for (int i = 0; i < n_h; ++i, ++row) {
        const double len = lay.mesh.nominal[i + 1] - lay.mesh.nominal[i];
        const double phi = lay.mesh.phi[i];
        np.il(row) = std::max((1.0 - phi) * len, floor_len);
        np.iu(row) = phi * span + (1.0 - phi) * len;
      }
    }
  }

  if (mode == ConstraintMode::SamplePoints) {
    np.zl.resize(np.n);
    np.zu.resize(np.n);
    for (int idx = 0; idx < lay.num_states; ++idx) {
      np.zl(idx) = c.xl(idx % dop.n_x);
      np.zu(idx) = c.xu(idx % dop.n_x);
    }
    for (int idx = 0; idx < lay.num_inputs; ++idx) {
      np.zl(lay.num_states + idx) = c.ul(idx % dop.n_u);
      np.zu(lay.num_states + idx) = c.uu(idx % dop.n_u);
    }
  }

  np.z0 = initial_guess(c);
  return tp;
}

Trajectory extract_trajectory(const DecisionLayout& layout, const Eigen::VectorXd& z) {
  if (z.size() != layout.total())
    throw std::invalid_argument("extract_trajectory: dimension mismatch");
  Trajectory tr;
  tr.t0 = layout.mesh.t0;
  tr.tf = layout.mesh.tf;
  tr.breakpoints.resize(layout.n_h + 1);
  tr.breakpoints.front() = tr.t0;
  tr.breakpoints.back() = tr.tf;
  for (int i = 1; i < layout.n_h; ++i)
    tr.breakpoints[i] =
        layout.num_mesh > 0 ? z(layout.mesh_index(i)) : layout.mesh.nominal[i];

  tr.states.resize(layout.n_h);
  tr.inputs.resize(layout.n_h);
  for (int i = 0; i < layout.n_h; ++i) {
    tr.states[i].resize(layout.n + 1, layout.n_x);
    for (int j = 0; j <= layout.n; ++j)
      for (int k = 0; k < layout.n_x; ++k)
        tr.states[i](j, k) = z(layout.state_index(i, j, k));
    tr.inputs[i].resize(layout.n, layout.n_u);
    for (int j = 0; j < layout.n; ++j)
      for (int k = 0; k < layout.n_u; ++k)
        tr.inputs[i](j, k) = z(layout.input_index(i, j, k));
  }
  tr.sgrid = quadrature::state_grid(layout.n);
  tr.ugrid = quadrature::input_grid(layout.n);
  return tr;
}

namespace {

Eigen::VectorXd eval_columns(const Eigen::MatrixXd& samples,
                             const quadrature::InterpolationGrid& grid,
                             double tau) {
  Eigen::VectorXd out(samples.cols());
  for (int k = 0; k < samples.cols(); ++k) {
    const auto col = samples.col(k);
    out(k) = quadrature::interpolate(
        grid, std::span<const double>(col.data(), col.size()), tau);
  }
  return out;
}

}  // namespace

Eigen::VectorXd resample(const DecisionLayout& layout, const Trajectory& traj) {
  std::vector<double> bp = layout.mesh.nominal;
  if (layout.mode == ConstraintMode::BernsteinFlexible &&
      traj.intervals() == layout.n_h)
    bp = traj.breakpoints;
  // On a matching mesh every interval is resampled from its own piece, so
  // left-endpoint input samples keep that piece's value instead of the left
  // neighbor's extrapolation; otherwise times resolve globally.
  const bool same_mesh = bp == traj.breakpoints;
  const quadrature::InterpolationGrid sgrid = quadrature::state_grid(layout.n);
  const quadrature::InterpolationGrid ugrid = quadrature::input_grid(layout.n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(layout.total());
  for (int i = 0; i < layout.n_h; ++i) {
    const double a = bp[i];
    const double h = bp[i + 1] - bp[i];
    for (int j = 0; j <= layout.n; ++j) {
      const Eigen::VectorXd x =
          same_mesh ? eval_columns(traj.states[i], traj.sgrid, sgrid.points[j])
                    : traj.state(a + 0.5 * (sgrid.points[j] + 1.0) * h);
      for (int k = 0; k < layout.n_x; ++k) z(layout.state_index(i, j, k)) = x(k);
    }
    for (int j = 0; j < layout.n; ++j) {
      const Eigen::VectorXd u =
          same_mesh ? eval_columns(traj.inputs[i], traj.ugrid, ugrid.points[j])
                    : traj.input(a + 0.5 * (ugrid.points[j] + 1.0) * h);
      for (int k = 0; k < layout.n_u; ++k) z(layout.input_index(i, j, k)) = u(k);
    }
  }
  for (int i = 1; i < layout.n_h && layout.num_mesh > 0; ++i)
    z(layout.mesh_index(i)) = bp[i];
  return z;
}

int Trajectory::interval_of(double t) const {
  t = std::clamp(t, t0, tf);
  const auto it = std::lower_bound(breakpoints.begin() + 1, breakpoints.end(), t);
  const int i = static_cast<int>(it - (breakpoints.begin() + 1));
  return std::min(i, intervals() - 1);
}

Eigen::VectorXd Trajectory::state(double t) const {
  const int i = interval_of(t);
  const double h = breakpoints[i + 1] - breakpoints[i];
  const double tau = 2.0 * (t - breakpoints[i]) / h - 1.0;
  Eigen::VectorXd out(states[i].cols());
  for (int k = 0; k < states[i].cols(); ++k) {
    const auto col = states[i].col(k);
    out(k) = quadrature::interpolate(
        sgrid, std::span<const double>(col.data(), col.size()), tau);
  }
  return out;
}

Eigen::VectorXd Trajectory::input(double t) const {
  const int i = interval_of(t);
  const double h = breakpoints[i + 1] - breakpoints[i];
  const double tau = 2.0 * (t - breakpoints[i]) / h - 1.0;
  Eigen::VectorXd out(inputs[i].cols());
  for (int k = 0; k < inputs[i].cols(); ++k) {
    const auto col = inputs[i].col(k);
    out(k) = quadrature::interpolate(
        ugrid, std::span<const double>(col.data(), col.size()), tau);
  }
  return out;
}

Eigen::VectorXd Trajectory::state_derivative(double t) const {
  const int i = interval_of(t);
  const double h = breakpoints[i + 1] - breakpoints[i];
  const double tau = 2.0 * (t - breakpoints[i]) / h - 1.0;
  Eigen::VectorXd out(states[i].cols());
  for (int k = 0; k < states[i].cols(); ++k) {
    const Eigen::VectorXd d = sgrid.diff * states[i].col(k);
    out(k) = (2.0 / h) * quadrature::interpolate(
                             sgrid, std::span<const double>(d.data(), d.size()), tau);
  }
  return out;
}

DopDefinition reduce_path_constraint(const DopDefinition& dop, const PathOutput& g,
                                     const Eigen::VectorXd& g_lower,
                                     const Eigen::VectorXd& g_upper) {
  const int ng = g.dim;
  if (g_lower.size() != ng || g_upper.size() != ng)
    throw std::invalid_argument("reduce_path_constraint: bound size mismatch");
  for (int i = 0; i < ng; ++i)
    if (bounded(g_lower(i)) && bounded(g_upper(i)) && g_lower(i) > g_upper(i))
      throw std::invalid_argument("reduce_path_constraint: inconsistent bounds");
  if (!g.value) throw std::invalid_argument("reduce_path_constraint: callback missing");

  DopDefinition out = dop;
  const int nu0 = dop.n_u;
  const int nr0 = dop.r.dim;
  out.n_u = nu0 + ng;

  out.u_lower = Eigen::VectorXd::Constant(out.n_u, -kUnbounded);
  out.u_upper = Eigen::VectorXd::Constant(out.n_u, kUnbounded);
  out.u_lower.head(nu0) = normalize_box(dop.u_lower, nu0, -kUnbounded);
  out.u_upper.head(nu0) = normalize_box(dop.u_upper, nu0, kUnbounded);
  out.u_lower.tail(ng) = g_lower;
  out.u_upper.tail(ng) = g_upper;

  const DynamicsResidual r0 = dop.r;
  out.r.dim = nr0 + ng;
  out.r.value = [r0, g, nu0, nr0, ng](std::span<const double> xd,
                                      std::span<const double> x,
                                      std::span<const double> u, double t,
                                      std::span<double> res) {
    r0.value(xd, x, u.first(nu0), t, res.first(nr0));
    g.value(x, u.first(nu0), t, res.subspan(nr0, ng));
    for (int q = 0; q < ng; ++q) res[nr0 + q] -= u[nu0 + q];
  };
  if (r0.dual && g.dual)
    out.r.dual = [r0, g, nu0, nr0, ng](std::span<const Dual> xd,
                                       std::span<const Dual> x,
                                       std::span<const Dual> u, const Dual& t,
                                       std::span<Dual> res) {
      r0.dual(xd, x, u.first(nu0), t, res.first(nr0));
      g.dual(x, u.first(nu0), t, res.subspan(nr0, ng));
      for (int q = 0; q < ng; ++q) res[nr0 + q] -= u[nu0 + q];
    };

  if (dop.l.value) {
    const RunningCost l0 = dop.l;
    out.l.value = [l0, nu0](std::span<const double> x, std::span<const double> u,
                            double t) { return l0.value(x, u.first(nu0), t); };
    if (l0.dual)
      out.l.dual = [l0, nu0](std::span<const Dual> x, std::span<const Dual> u,
                             const Dual& t) { return l0.dual(x, u.first(nu0), t); };
  }
  return out;
}

}  // namespace flexcolloc::transcription
