#pragma once

#include "flexcolloc/dual.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace flexcolloc::nlp {

/// Bounds at or beyond this magnitude are treated as absent.
constexpr double kUnbounded = 1e20;

/// Scalar function of the decision vector. The dual overload propagates
/// derivatives; when absent the solver falls back to central differences.
struct ScalarCallback {
  std::function<double(std::span<const double>)> value;
  std::function<Dual(std::span<const Dual>)> dual;
};

/// Vector function writing dim outputs.
struct VectorCallback {
  int dim = 0;
  std::function<void(std::span<const double>, std::span<double>)> value;
  std::function<void(std::span<const Dual>, std::span<Dual>)> dual;
};

/// Wraps a callable templated on the scalar type (invocable on spans of
/// double and of Dual) into both overloads.
template <class F>
ScalarCallback make_scalar(F f) {
  ScalarCallback cb;
  cb.value = [f](std::span<const double> z) -> double { return f(z); };
  cb.dual = [f](std::span<const Dual> z) -> Dual { return f(z); };
  return cb;
}

template <class F>
VectorCallback make_vector(int dim, F f) {
  VectorCallback cb;
  cb.dim = dim;
  cb.value = [f](std::span<const double> z, std::span<double> out) { f(z, out); };
  cb.dual = [f](std::span<const Dual> z, std::span<Dual> out) { f(z, out); };
  return cb;
}

/// Gradient by forward-mode evaluation, or central differences with step
/// 1e-6 * max(1, |z_i|) when no dual overload is present.
Eigen::VectorXd gradient(const ScalarCallback& f, const Eigen::VectorXd& z);
Eigen::MatrixXd jacobian(const VectorCallback& c, const Eigen::VectorXd& z);

/// minimize f(z)
/// subject to c_E(z) = 0,  il <= c_I(z) <= iu,  zl <= z <= zu.
/// Empty bound vectors mean absent; il == iu rows act as equalities.
struct NlpProblem {
  int n = 0;
  ScalarCallback objective;
  VectorCallback equalities;    // dim 0 when absent
  VectorCallback inequalities;  // dim 0 when absent
  Eigen::VectorXd il, iu;       // size inequalities.dim
  Eigen::VectorXd zl, zu;       // size n or 0
  Eigen::VectorXd z0;
};

enum class SolveStatus { Converged, MaxIter, Infeasible };

struct NlpSolution {
  SolveStatus status = SolveStatus::MaxIter;
  Eigen::VectorXd z;
  /// Signed multipliers in the stationarity identity
  /// grad f = J_E' lambda_eq + J_I' lambda_ineq + lambda_bounds,
  /// positive when a lower side is active, negative for an upper side.
  Eigen::VectorXd lambda_eq;
  Eigen::VectorXd lambda_ineq;
  Eigen::VectorXd lambda_bounds;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double constraint_violation = 0.0;
  int iterations = 0;
  /// l1 merit value before and after each accepted step, at the penalty
  /// weight used for that step's line search.
  std::vector<std::array<double, 2>> merit_history;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
};

/// Dense SQP: damped BFGS Hessian approximation, l1-merit backtracking line
/// search, active-set QP subproblems with an elastic relaxation when a
/// linearization is inconsistent. Objective and constraints are internally
/// scaled by max(1, |value at z0|).
NlpSolution solve(const NlpProblem& p, const SolverOptions& options = {});

}  // namespace flexcolloc::nlp
