#pragma once

#include <Eigen/Core>

namespace flexcolloc::qp {

enum class QpStatus { Optimal, Infeasible, IterationLimit, Degenerate };

/// minimize 0.5 z'Hz + g'z  subject to  Ae z = be  and  Ai z >= bi.
/// H must be symmetric positive definite on the null space of Ae.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd Ae;
  Eigen::VectorXd be;
  Eigen::MatrixXd Ai;
  Eigen::VectorXd bi;
};

struct QpSolution {
  QpStatus status = QpStatus::Degenerate;
  Eigen::VectorXd z;
  /// Multipliers satisfying H z + g = Ae' lambda_eq + Ai' lambda_in with
  /// lambda_in >= 0 and lambda_in complementary to the inequality slacks.
  Eigen::VectorXd lambda_eq;
  Eigen::VectorXd lambda_in;
  double objective = 0.0;
  int iterations = 0;
};

/// Eliminates the equalities through a QR null-space basis, then runs a dual
/// active-set method on the reduced strictly convex problem. max_iterations 0
/// picks a limit from the problem size.
QpSolution solve(const QpProblem& qp, int max_iterations = 0);

}  // namespace flexcolloc::qp
