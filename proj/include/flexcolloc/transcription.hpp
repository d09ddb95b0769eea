#pragma once

#include "flexcolloc/nlp.hpp"
#include "flexcolloc/quadrature.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <vector>

namespace flexcolloc::transcription {

/// Boundary cost m(x(t0), x(tf)).
struct BoundaryCost {
  std::function<double(std::span<const double>, std::span<const double>)> value;
  std::function<Dual(std::span<const Dual>, std::span<const Dual>)> dual;
};

/// Running cost l(x, u, t).t participates in differentiation because the
/// collocation times move with a flexible mesh.
struct RunningCost {
  std::function<double(std::span<const double>, std::span<const double>, double)> value;
  std::function<Dual(std::span<const Dual>, std::span<const Dual>, const Dual&)> dual;
};

/// Boundary condition b(x(t0), x(tf)) = 0 with dim outputs.
struct BoundaryCondition {
  int dim = 0;
  std::function<void(std::span<const double>, std::span<const double>,
                     std::span<double>)> value;
  std::function<void(std::span<const Dual>, std::span<const Dual>, std::span<Dual>)>
      dual;
};

/// Dynamics residual r(xdot, x, u, t) = 0 with dim outputs.
struct DynamicsResidual {
  int dim = 0;
  std::function<void(std::span<const double>, std::span<const double>,
                     std::span<const double>, double, std::span<double>)> value;
  std::function<void(std::span<const Dual>, std::span<const Dual>,
                     std::span<const Dual>, const Dual&, std::span<Dual>)> dual;
};

/// Path output g(x, u, t) with dim outputs, used by reduce_path_constraint.
struct PathOutput {
  int dim = 0;
  std::function<void(std::span<const double>, std::span<const double>, double,
                     std::span<double>)> value;
  std::function<void(std::span<const Dual>, std::span<const Dual>, const Dual&,
                     std::span<Dual>)> dual;
};

template <class F>
BoundaryCost make_boundary_cost(F f) {
  BoundaryCost cb;
  cb.value = [f](std::span<const double> a, std::span<const double> b) -> double {
    return f(a, b);
  };
  cb.dual = [f](std::span<const Dual> a, std::span<const Dual> b) -> Dual {
    return f(a, b);
  };
  return cb;
}

template <class F>
RunningCost make_running_cost(F f) {
  RunningCost cb;
  cb.value = [f](std::span<const double> x, std::span<const double> u,
                 double t) -> double { return f(x, u, t); };
  cb.dual = [f](std::span<const Dual> x, std::span<const Dual> u,
                const Dual& t) -> Dual { return f(x, u, t); };
  return cb;
}

template <class F>
BoundaryCondition make_boundary_condition(int dim, F f) {
  BoundaryCondition cb;
  cb.dim = dim;
  cb.value = [f](std::span<const double> a, std::span<const double> b,
                 std::span<double> out) { f(a, b, out); };
  cb.dual = [f](std::span<const Dual> a, std::span<const Dual> b,
                std::span<Dual> out) { f(a, b, out); };
  return cb;
}

template <class F>
DynamicsResidual make_dynamics(int dim, F f) {
  DynamicsResidual cb;
  cb.dim = dim;
  cb.value = [f](std::span<const double> xd, std::span<const double> x,
                 std::span<const double> u, double t, std::span<double> out) {
    f(xd, x, u, t, out);
  };
  cb.dual = [f](std::span<const Dual> xd, std::span<const Dual> x,
                std::span<const Dual> u, const Dual& t, std::span<Dual> out) {
    f(xd, x, u, t, out);
  };
  return cb;
}

template <class F>
PathOutput make_path_output(int dim, F f) {
  PathOutput cb;
  cb.dim = dim;
  cb.value = [f](std::span<const double> x, std::span<const double> u, double t,
                 std::span<double> out) { f(x, u, t, out); };
  cb.dual = [f](std::span<const Dual> x, std::span<const Dual> u, const Dual& t,
                std::span<Dual> out) { f(x, u, t, out); };
  return cb;
}

/// Continuous-time problem: minimize m + integral of l subject to dynamics,
/// boundary conditions, and state/input boxes. Bounds at +-nlp::kUnbounded
/// mean absent. x0_hint/xf_hint guide the initial guess; NaN components are
/// treated as undetermined.
struct DopDefinition {
  int n_x = 0;
  int n_u = 0;
  double t0 = 0.0;
  double tf = 1.0;
  BoundaryCost m;        // absent when value is empty
  RunningCost l;         // absent when value is empty
  BoundaryCondition b;   // dim 0 when absent
  DynamicsResidual r;
  Eigen::VectorXd x_lower, x_upper;
  Eigen::VectorXd u_lower, u_upper;
  Eigen::VectorXd x0_hint, xf_hint;  // size n_x or empty
};

/// Sub-interval layout of the horizon. Breakpoints between intervals may move
/// within length bounds controlled per interval by phi in [0, 1): interval i
/// must keep length in [(1-phi_i) len_i, phi_i (tf-t0) + (1-phi_i) len_i]
/// where len_i is its nominal length.
struct FlexibleMesh {
  double t0 = 0.0;
  double tf = 1.0;
  std::vector<double> nominal;  // n_h+1 breakpoints including t0 and tf
  std::vector<double> phi;      // n_h values

  static FlexibleMesh uniform(double t0, double tf, int n_h, double phi);
  int intervals() const { return static_cast<int>(phi.size()); }
};

/// How inequalities on states and inputs are imposed:
///   SamplePoints      bounds on the raw collocation samples
///   BernsteinFixed    bounds on Bernstein coefficients, mesh fixed
///   BernsteinFlexible bounds on Bernstein coefficients, breakpoints decided
enum class ConstraintMode { SamplePoints, BernsteinFixed, BernsteinFlexible };

/// Flat variable layout: states first, then inputs, then interior
/// breakpoints. The state sample at the right end of interval i is the same
/// variable as the left end of interval i+1, so continuity holds by
/// construction.
struct DecisionLayout {
  int n = 0;  // interpolation degree: n+1 state points, n input points
  int n_h = 0;
  int n_x = 0;
  int n_u = 0;
  ConstraintMode mode = ConstraintMode::SamplePoints;
  int num_states = 0;
  int num_inputs = 0;
  int num_mesh = 0;
  FlexibleMesh mesh;

  int total() const { return num_states + num_inputs + num_mesh; }

  /// i in [0, n_h), j in [0, n], k in [0, n_x).
  int state_index(int i, int j, int k) const { return (i * n + j) * n_x + k; }
  /// i in [0, n_h), j in [0, n), k in [0, n_u).
  int input_index(int i, int j, int k) const {
    return num_states + (i * n + j) * n_u + k;
  }
  /// Interior breakpoint i in [1, n_h). Only present in BernsteinFlexible.
  int mesh_index(int i) const { return num_states + num_inputs + (i - 1); }
};

struct TranscribedProblem {
  nlp::NlpProblem nlp;
  DecisionLayout layout;
};

/// Piecewise-polynomial solution. States are continuous across breakpoints;
/// inputs may jump there (breakpoint queries use the left interval).
struct Trajectory {
  double t0 = 0.0;
  double tf = 1.0;
  std::vector<double> breakpoints;       // n_h+1 resolved values
  std::vector<Eigen::MatrixXd> states;   // per interval, (n+1) x n_x
  std::vector<Eigen::MatrixXd> inputs;   // per interval, n x n_u
  quadrature::InterpolationGrid sgrid;
  quadrature::InterpolationGrid ugrid;

  int intervals() const { return static_cast<int>(states.size()); }
  int interval_of(double t) const;
  Eigen::VectorXd state(double t) const;
  Eigen::VectorXd input(double t) const;
  Eigen::VectorXd state_derivative(double t) const;
};

/// Affine map from tau in [-1, 1] onto [dt_prev, dt_cur].
double gamma(double tau, double dt_prev, double dt_cur);

/// Bernstein coefficients of the interpolant through the grid points,
/// parameterized on [0, 1] via s = 0.5 tau + 0.5. Rows map sample values to
/// coefficients; constants reproduce themselves.
Eigen::MatrixXd bernstein_transfer_matrix(const quadrature::InterpolationGrid& grid);

/// Discretizes dop with degree n on the given mesh in the given mode.
TranscribedProblem assemble(const DopDefinition& dop, int n, const FlexibleMesh& mesh,
                            ConstraintMode mode);

Trajectory extract_trajectory(const DecisionLayout& layout, const Eigen::VectorXd& z);

/// Decision vector for layout whose samples reproduce traj, the warm-start
/// counterpart of extract_trajectory. States and inputs are resampled at the
/// layout's own grids; interior breakpoints carry over when the layout is
/// flexible with a matching interval count, else the nominal mesh is used.
/// On a matching mesh each interval is resampled from its own piece, so
/// extract followed by resample is the identity even for inputs that jump
/// at breakpoints.
Eigen::VectorXd resample(const DecisionLayout& layout, const Trajectory& traj);

/// Adjoins slack inputs s with box [g_lower, g_upper] and the algebraic rows
/// g(x, u, t) - s = 0, turning a path constraint into box form.
DopDefinition reduce_path_constraint(const DopDefinition& dop, const PathOutput& g,
                                     const Eigen::VectorXd& g_lower,
                                     const Eigen::VectorXd& g_upper);

}  // namespace flexcolloc::transcription
